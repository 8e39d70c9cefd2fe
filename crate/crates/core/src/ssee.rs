//! Set sequences equipped with embeddings.
//!
//! A family fixes the coordinate sets `V_n` and, for every `N <= n`, the
//! collection of embeddings `V_N -> V_n`. Each collection is addressed by a
//! dense index `0..count` whose decoding yields every distinct injection
//! exactly once, which gives both enumeration and exactly-uniform sampling
//! without materialising the collection.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binomial, edge_endpoints, edge_index, falling_factorial, unrank_arrangement, unrank_combination,
};
use crate::error::{Error, Result};

/// Hard cap on the number of embeddings a single enumeration may produce.
pub const DEFAULT_EMBEDDING_BUDGET: u128 = 10_000_000;

/// Largest supported `|V_n|`.
pub const MAX_DIMENSION: usize = 1 << 24;

/// Identifier of a coordinate within `V_n`.
pub type CoordId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `V_n = E(K_n)`, embeddings induced by vertex injections.
    CompleteGraphEdges,
    /// `V_n = {0,1}^n`, embeddings fixing a base point off a sorted coordinate set.
    HypercubeVertices,
    /// `V_n = [n]`, embeddings `x -> a + x d`.
    ArithmeticProgressions,
    /// `V_n = [n]`, order-preserving injections.
    OrderInjections,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::CompleteGraphEdges,
        Family::HypercubeVertices,
        Family::ArithmeticProgressions,
        Family::OrderInjections,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::CompleteGraphEdges => "complete-graph-edges",
            Family::HypercubeVertices => "hypercube-vertices",
            Family::ArithmeticProgressions => "arithmetic-progressions",
            Family::OrderInjections => "order-injections",
        }
    }

    /// `|V_n|`.
    pub fn dimension(self, n: u32) -> Result<usize> {
        if n == 0 {
            return Err(Error::Parameter("level n must be at least 1".into()));
        }
        let dim: u128 = match self {
            Family::CompleteGraphEdges => n as u128 * (n as u128 - 1) / 2,
            Family::HypercubeVertices => {
                if n >= 64 {
                    return Err(Error::Capacity(format!("hypercube level {n} cannot be packed")));
                }
                1u128 << n
            }
            Family::ArithmeticProgressions | Family::OrderInjections => n as u128,
        };
        if dim > MAX_DIMENSION as u128 {
            return Err(Error::Capacity(format!(
                "|V_{n}| = {dim} exceeds the supported maximum {MAX_DIMENSION} for {}",
                self.name()
            )));
        }
        Ok(dim as usize)
    }

    fn check_levels(self, source: u32, target: u32) -> Result<()> {
        if source == 0 || source > target {
            return Err(Error::Parameter(format!(
                "embedding levels must satisfy 1 <= N <= n, got N={source}, n={target}"
            )));
        }
        self.dimension(target)?;
        Ok(())
    }

    /// `|binom(V_n, V_N)|`, counting distinct injections.
    pub fn embedding_count(self, source: u32, target: u32) -> Result<u128> {
        self.check_levels(source, target)?;
        let (big, n) = (source as u64, target as u64);
        let overflow = || Error::Capacity(format!("embedding count for N={big}, n={n} overflows"));
        match self {
            Family::CompleteGraphEdges => match big {
                1 => Ok(1),
                2 => binomial(n, 2).ok_or_else(overflow),
                _ => falling_factorial(n, big).ok_or_else(overflow),
            },
            Family::HypercubeVertices => binomial(n, big)
                .and_then(|c| c.checked_mul(1u128 << (n - big)))
                .ok_or_else(overflow),
            Family::ArithmeticProgressions => {
                if big == 1 {
                    return Ok(n as u128);
                }
                Ok((1..=n / big).map(|d| (n - big * d + 1) as u128).sum())
            }
            Family::OrderInjections => binomial(n, big).ok_or_else(overflow),
        }
    }

    /// Decodes the embedding with the given index in `0..embedding_count`.
    pub fn embedding_at(self, source: u32, target: u32, index: u128) -> Result<Embedding> {
        let count = self.embedding_count(source, target)?;
        if index >= count {
            return Err(Error::Parameter(format!("embedding index {index} out of range 0..{count}")));
        }
        Ok(self.decode(source, target, index))
    }

    fn decode(self, source: u32, target: u32, index: u128) -> Embedding {
        let map = match self {
            Family::CompleteGraphEdges => match source {
                1 => Vec::new(),
                2 => {
                    let pair = unrank_combination(target, 2, index);
                    vec![edge_index(target, pair[0], pair[1])]
                }
                _ => {
                    let f = unrank_arrangement(target, source, index);
                    let mut map = Vec::with_capacity((source * (source - 1) / 2) as usize);
                    for a in 0..source {
                        for b in a + 1..source {
                            map.push(edge_index(target, f[a as usize], f[b as usize]));
                        }
                    }
                    map
                }
            },
            Family::HypercubeVertices => {
                let free = target - source;
                let per_set = 1u128 << free;
                let fixed = unrank_combination(target, source, index / per_set);
                let base_bits = (index % per_set) as u64;
                let complement: Vec<u32> = (0..target).filter(|q| !fixed.contains(q)).collect();
                let base = complement
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (q, &pos)| acc | (((base_bits >> q) & 1) << pos));
                (0..1u64 << source)
                    .map(|v| {
                        fixed
                            .iter()
                            .enumerate()
                            .fold(base, |acc, (j, &pos)| acc | (((v >> j) & 1) << pos))
                            as u32
                    })
                    .collect()
            }
            Family::ArithmeticProgressions => {
                if source == 1 {
                    vec![index as u32]
                } else {
                    let mut rest = index;
                    let mut step = 1u32;
                    loop {
                        let block = (target - source * step + 1) as u128;
                        if rest < block {
                            break;
                        }
                        rest -= block;
                        step += 1;
                    }
                    let offset = rest as u32;
                    // value a + x d for x in 1..=N, stored 0-based
                    (1..=source).map(|x| offset + x * step - 1).collect()
                }
            }
            Family::OrderInjections => unrank_combination(target, source, index),
        };
        Embedding {
            family: self,
            source,
            target,
            map,
        }
    }

    /// Every embedding of `V_N` into `V_n`, refusing collections larger than
    /// [`DEFAULT_EMBEDDING_BUDGET`].
    pub fn embeddings(self, source: u32, target: u32) -> Result<Embeddings> {
        self.embeddings_with_budget(source, target, DEFAULT_EMBEDDING_BUDGET)
    }

    pub fn embeddings_with_budget(self, source: u32, target: u32, budget: u128) -> Result<Embeddings> {
        let count = self.embedding_count(source, target)?;
        if count > budget {
            return Err(Error::EnumerationTooLarge { count, budget });
        }
        Ok(Embeddings {
            family: self,
            source,
            target,
            next: 0,
            count,
        })
    }

    /// Uniformly random embedding; the collection is never materialised.
    pub fn sample_embedding<R: Rng + ?Sized>(self, source: u32, target: u32, rng: &mut R) -> Result<Embedding> {
        let count = self.embedding_count(source, target)?;
        let index = rng.gen_range(0..count);
        Ok(self.decode(source, target, index))
    }

    /// Membership predicate for `binom(V_n, V_N)`.
    pub fn is_embedding(self, emb: &Embedding) -> bool {
        if emb.family != self || self.check_levels(emb.source, emb.target).is_err() {
            return false;
        }
        let (big, n, map) = (emb.source, emb.target, &emb.map);
        let dim = match self.dimension(n) {
            Ok(d) => d as u32,
            Err(_) => return false,
        };
        if map.iter().any(|&c| c >= dim) {
            return false;
        }
        match self {
            Family::CompleteGraphEdges => {
                let expected = (big * (big.saturating_sub(1)) / 2) as usize;
                if map.len() != expected {
                    return false;
                }
                if big <= 2 {
                    return true;
                }
                let edge_of = |a: u32, b: u32| map[edge_index(big, a, b) as usize];
                let mut vertex = Vec::with_capacity(big as usize);
                for v in 0..big {
                    let others: Vec<u32> = (0..big).filter(|&w| w != v).take(2).collect();
                    let (p, q) = edge_endpoints(n, edge_of(v, others[0]));
                    let (r, s) = edge_endpoints(n, edge_of(v, others[1]));
                    let common: Vec<u32> = [p, q].into_iter().filter(|x| *x == r || *x == s).collect();
                    if common.len() != 1 {
                        return false;
                    }
                    vertex.push(common[0]);
                }
                let mut sorted = vertex.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != vertex.len() {
                    return false;
                }
                (0..big).all(|a| {
                    (a + 1..big).all(|b| edge_of(a, b) == edge_index(n, vertex[a as usize], vertex[b as usize]))
                })
            }
            Family::HypercubeVertices => {
                if map.len() != 1usize << big {
                    return false;
                }
                let base = map[0] as u64;
                let mut bits = Vec::with_capacity(big as usize);
                for j in 0..big {
                    let diff = map[1usize << j] as u64 ^ base;
                    if diff.count_ones() != 1 || diff & base != 0 {
                        return false;
                    }
                    if let Some(&prev) = bits.last() {
                        if diff <= prev {
                            return false;
                        }
                    }
                    bits.push(diff);
                }
                map.iter().enumerate().all(|(v, &img)| {
                    let expect = bits
                        .iter()
                        .enumerate()
                        .fold(base, |acc, (j, &b)| if (v >> j) & 1 == 1 { acc | b } else { acc });
                    img as u64 == expect
                })
            }
            Family::ArithmeticProgressions => {
                if map.len() != big as usize {
                    return false;
                }
                if big == 1 {
                    return true;
                }
                let step = map[1] as i64 - map[0] as i64;
                if step < 1 || (map[0] as i64 + 1) < step {
                    return false;
                }
                map.windows(2).all(|w| w[1] as i64 - w[0] as i64 == step)
            }
            Family::OrderInjections => map.len() == big as usize && map.windows(2).all(|w| w[0] < w[1]),
        }
    }

    /// Counts and ratios behind the three goodness conditions.
    pub fn goodness_audit(self, source: u32, levels: &[u32]) -> Result<Vec<GoodnessReport>> {
        levels.iter().map(|&n| self.goodness_report(source, n)).collect()
    }

    fn goodness_report(self, source: u32, target: u32) -> Result<GoodnessReport> {
        let embeddings: Vec<Embedding> = self.embeddings(source, target)?.collect();
        let embedding_count = embeddings.len() as u128;
        let coord_count = self.dimension(target)? as u128;
        let source_size = self.dimension(source)?;

        let mut images: HashMap<Vec<u64>, u128> = HashMap::new();
        for e in &embeddings {
            *images.entry(e.image_bitset(coord_count as usize)).or_default() += 1;
        }
        let distinct: Vec<(Vec<u64>, u128)> = images.into_iter().collect();
        let pair_work = (distinct.len() as u128).pow(2);
        if pair_work > PAIR_BUDGET {
            return Err(Error::EnumerationTooLarge {
                count: pair_work,
                budget: PAIR_BUDGET,
            });
        }
        let mut intersect_count: u128 = 0;
        for (a, ma) in &distinct {
            for (b, mb) in &distinct {
                let shared: usize = a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum();
                if shared > 1 && shared < source_size {
                    intersect_count += ma * mb;
                }
            }
        }
        Ok(GoodnessReport {
            source,
            target,
            embedding_count,
            coord_count,
            intersect_count,
            ratio_cond2: Ratio::new(embedding_count, coord_count),
            ratio_cond3: Ratio::new(coord_count * intersect_count, embedding_count * embedding_count),
        })
    }

    /// Per-coordinate counts of embeddings whose image contains it.
    pub fn homogeneity(self, source: u32, target: u32) -> Result<Homogeneity> {
        let dim = self.dimension(target)?;
        let mut per_coord = vec![0u128; dim];
        for e in self.embeddings(source, target)? {
            for &c in &e.map {
                per_coord[c as usize] += 1;
            }
        }
        let homogeneous = per_coord.first().is_some_and(|&c| c > 0) && per_coord.iter().all(|&c| c == per_coord[0]);
        Ok(Homogeneity {
            homogeneous,
            per_coord,
        })
    }
}

const PAIR_BUDGET: u128 = 1_000_000_000;

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete-graph-edges" | "complete-graph" | "graph" | "k" => Ok(Family::CompleteGraphEdges),
            "hypercube-vertices" | "hypercube" | "q" => Ok(Family::HypercubeVertices),
            "arithmetic-progressions" | "ap" => Ok(Family::ArithmeticProgressions),
            "order-injections" | "order" | "permutation" => Ok(Family::OrderInjections),
            other => Err(Error::Parameter(format!("unknown family '{other}'"))),
        }
    }
}

/// An injection `V_N -> V_n` from a family's collection.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Embedding {
    pub family: Family,
    pub source: u32,
    pub target: u32,
    /// `map[i]` is the image of source coordinate `i`.
    pub map: Vec<CoordId>,
}

impl Embedding {
    /// `(x_{phi(i)})_{i in V_N}` for a point `x` of `[0,1]^{V_n}`.
    pub fn pull_back<T: Copy>(&self, point: &[T]) -> Vec<T> {
        self.map.iter().map(|&c| point[c as usize]).collect()
    }

    pub fn image_bitset(&self, target_dim: usize) -> Vec<u64> {
        let mut bits = vec![0u64; target_dim.div_ceil(64)];
        for &c in &self.map {
            bits[c as usize / 64] |= 1 << (c % 64);
        }
        bits
    }

    /// Source coordinate mapped onto `coord`, if any.
    pub fn preimage(&self, coord: CoordId) -> Option<usize> {
        self.map.iter().position(|&c| c == coord)
    }
}

/// Lazily decoded embedding collection.
#[derive(Clone, Debug)]
pub struct Embeddings {
    family: Family,
    source: u32,
    target: u32,
    next: u128,
    count: u128,
}

impl Embeddings {
    pub fn count(&self) -> u128 {
        self.count
    }
}

impl Iterator for Embeddings {
    type Item = Embedding;

    fn next(&mut self) -> Option<Embedding> {
        if self.next >= self.count {
            return None;
        }
        let e = self.family.decode(self.source, self.target, self.next);
        self.next += 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Embeddings {}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodnessReport {
    #[serde(rename = "N")]
    pub source: u32,
    #[serde(rename = "n")]
    pub target: u32,
    pub embedding_count: u128,
    pub coord_count: u128,
    /// Ordered pairs of embeddings whose images share `i` coordinates,
    /// `1 < i < |V_N|`.
    pub intersect_count: u128,
    #[serde(serialize_with = "ratio_as_string")]
    pub ratio_cond2: Ratio<u128>,
    #[serde(serialize_with = "ratio_as_string")]
    pub ratio_cond3: Ratio<u128>,
}

fn ratio_as_string<S: serde::Serializer>(r: &Ratio<u128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homogeneity {
    pub homogeneous: bool,
    pub per_coord: Vec<u128>,
}

/// JSON form of a family at a pair of levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: Family,
    #[serde(rename = "N")]
    pub source: u32,
    pub n: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use std::collections::{BTreeMap, BTreeSet};

    #[test]
    fn dimensions() {
        assert_eq!(Family::CompleteGraphEdges.dimension(3).unwrap(), 3);
        assert_eq!(Family::HypercubeVertices.dimension(4).unwrap(), 16);
        assert_eq!(Family::OrderInjections.dimension(7).unwrap(), 7);
        assert_eq!(Family::ArithmeticProgressions.dimension(7).unwrap(), 7);
        assert!(matches!(Family::HypercubeVertices.dimension(30), Err(Error::Capacity(_))));
        assert!(Family::OrderInjections.dimension(0).is_err());
    }

    #[test]
    fn dimensions_strictly_increase() {
        for fam in Family::ALL {
            let dims: Vec<usize> = (1..8).map(|n| fam.dimension(n).unwrap()).collect();
            assert!(dims.windows(2).all(|w| w[0] < w[1]), "{fam}: {dims:?}");
        }
    }

    /// Hypercube oracle: every (u, S) pair with u ranging over all of Q_n.
    fn naive_hypercube(big: u32, n: u32) -> BTreeSet<Vec<u32>> {
        let mut out = BTreeSet::new();
        crate::combinatorics::for_each_combination(n, big, |s| {
            for u in 0..1u32 << n {
                let map = (0..1u32 << big)
                    .map(|v| {
                        let mut img = u;
                        for (j, &pos) in s.iter().enumerate() {
                            img = (img & !(1 << pos)) | (((v >> j) & 1) << pos);
                        }
                        img
                    })
                    .collect();
                out.insert(map);
            }
        });
        out
    }

    /// Complete-graph oracle: edge maps induced by all vertex injections.
    fn naive_complete(big: u32, n: u32) -> BTreeSet<Vec<u32>> {
        let mut out = BTreeSet::new();
        let count = falling_factorial(n as u64, big as u64).unwrap();
        for r in 0..count {
            let f = unrank_arrangement(n, big, r);
            let mut map = Vec::new();
            for a in 0..big {
                for b in a + 1..big {
                    map.push(edge_index(n, f[a as usize], f[b as usize]));
                }
            }
            out.insert(map);
        }
        out
    }

    fn naive_ap(big: u32, n: u32) -> BTreeSet<Vec<u32>> {
        let mut out = BTreeSet::new();
        for a in 0..=n {
            for d in 1..=n {
                if a + big * d <= n {
                    out.insert((1..=big).map(|x| a + x * d - 1).collect());
                }
            }
        }
        out
    }

    fn enumerated(fam: Family, big: u32, n: u32) -> Vec<Vec<u32>> {
        fam.embeddings(big, n).unwrap().map(|e| e.map).collect()
    }

    #[test]
    fn spec_enumeration_counts() {
        assert_eq!(enumerated(Family::HypercubeVertices, 1, 2).len(), 4);
        assert_eq!(enumerated(Family::CompleteGraphEdges, 3, 3).len(), 6);
        assert_eq!(enumerated(Family::OrderInjections, 2, 4).len(), 6);
    }

    #[test]
    fn enumeration_matches_deduplicated_oracles() {
        for n in 1..=4 {
            for big in 1..=n {
                let ours: BTreeSet<Vec<u32>> = enumerated(Family::HypercubeVertices, big, n).into_iter().collect();
                assert_eq!(ours, naive_hypercube(big, n), "hypercube {big},{n}");
                let ours: BTreeSet<Vec<u32>> = enumerated(Family::ArithmeticProgressions, big, n).into_iter().collect();
                assert_eq!(ours, naive_ap(big, n), "ap {big},{n}");
            }
        }
        for n in 1..=5 {
            for big in 1..=n {
                let ours: BTreeSet<Vec<u32>> = enumerated(Family::CompleteGraphEdges, big, n).into_iter().collect();
                assert_eq!(ours, naive_complete(big, n), "complete {big},{n}");
            }
        }
    }

    #[test]
    fn enumeration_is_duplicate_free_and_valid() {
        for fam in Family::ALL {
            for n in 1..=5 {
                for big in 1..=n {
                    let all = enumerated(fam, big, n);
                    let set: BTreeSet<_> = all.iter().cloned().collect();
                    assert_eq!(set.len(), all.len(), "{fam} {big},{n}");
                    assert_eq!(all.len() as u128, fam.embedding_count(big, n).unwrap());
                    for e in fam.embeddings(big, n).unwrap() {
                        assert!(fam.is_embedding(&e), "{fam} rejects its own {e:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn membership_rejects_non_embeddings() {
        let bad = Embedding {
            family: Family::OrderInjections,
            source: 2,
            target: 4,
            map: vec![2, 1],
        };
        assert!(!Family::OrderInjections.is_embedding(&bad));
        // a 3-cycle of edges that is not induced by a vertex map: edges of a triangle onto a path
        let bad = Embedding {
            family: Family::CompleteGraphEdges,
            source: 3,
            target: 4,
            map: vec![edge_index(4, 0, 1), edge_index(4, 1, 2), edge_index(4, 2, 3)],
        };
        assert!(!Family::CompleteGraphEdges.is_embedding(&bad));
        let bad = Embedding {
            family: Family::HypercubeVertices,
            source: 1,
            target: 2,
            map: vec![0, 3],
        };
        assert!(!Family::HypercubeVertices.is_embedding(&bad));
        let bad = Embedding {
            family: Family::ArithmeticProgressions,
            source: 2,
            target: 4,
            map: vec![1, 4],
        };
        assert!(!Family::ArithmeticProgressions.is_embedding(&bad));
    }

    #[test]
    fn budget_is_enforced() {
        let err = Family::CompleteGraphEdges.embeddings_with_budget(4, 9, 100).unwrap_err();
        assert_eq!(err, Error::EnumerationTooLarge { count: 3024, budget: 100 });
    }

    #[test]
    fn sampling_identity_and_determinism() {
        let mut rng = stream(1, 0);
        let e = Family::CompleteGraphEdges.sample_embedding(2, 2, &mut rng).unwrap();
        assert_eq!(e.map, vec![0]);
        let a = Family::HypercubeVertices.sample_embedding(3, 6, &mut stream(9, 3)).unwrap();
        let b = Family::HypercubeVertices.sample_embedding(3, 6, &mut stream(9, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_is_uniform_on_hypercube_1_2() {
        let draws = 400_000;
        let mut rng = stream(2024, 0);
        let mut freq: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for _ in 0..draws {
            let e = Family::HypercubeVertices.sample_embedding(1, 2, &mut rng).unwrap();
            *freq.entry(e.map).or_default() += 1;
        }
        assert_eq!(freq.len(), 4);
        let mut chi2 = 0.0;
        for &count in freq.values() {
            let p = count as f64 / draws as f64;
            assert!((p - 0.25).abs() <= 0.005, "frequency {p}");
            let expected = draws as f64 / 4.0;
            chi2 += (count as f64 - expected).powi(2) / expected;
        }
        // chi-square(3) 99% quantile
        assert!(chi2 < 11.345, "chi2 = {chi2}");
    }

    #[test]
    fn sampling_is_uniform_on_complete_3_4() {
        let fam = Family::CompleteGraphEdges;
        let count = fam.embedding_count(3, 4).unwrap() as usize;
        let draws = 120_000;
        let mut rng = stream(77, 0);
        let mut freq: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for _ in 0..draws {
            *freq.entry(fam.sample_embedding(3, 4, &mut rng).unwrap().map).or_default() += 1;
        }
        assert_eq!(freq.len(), count);
        let expected = draws as f64 / count as f64;
        let chi2: f64 = freq.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // chi-square(23) 99% quantile
        assert!(chi2 < 41.638, "chi2 = {chi2}");
    }

    #[test]
    fn goodness_hypercube_n1() {
        let reports = Family::HypercubeVertices.goodness_audit(1, &[2, 3, 4]).unwrap();
        let coords: Vec<u128> = reports.iter().map(|r| r.coord_count).collect();
        assert_eq!(coords, vec![4, 8, 16]);
        // |V_1| = 2 leaves no admissible intersection size 1 < i < 2
        for r in &reports {
            assert_eq!(r.intersect_count, 0);
            assert_eq!(r.ratio_cond3, Ratio::from_integer(0));
        }
    }

    /// Pairwise-intersection oracle without grouping by image.
    fn naive_intersections(fam: Family, big: u32, n: u32) -> u128 {
        let all: Vec<Vec<u32>> = enumerated(fam, big, n);
        let size = fam.dimension(big).unwrap();
        let mut total = 0;
        for a in &all {
            let sa: BTreeSet<_> = a.iter().collect();
            for b in &all {
                let shared = b.iter().filter(|c| sa.contains(c)).count();
                if shared > 1 && shared < size {
                    total += 1;
                }
            }
        }
        total
    }

    #[test]
    fn goodness_intersections_match_oracle() {
        for (fam, big, n) in [
            (Family::HypercubeVertices, 2, 4),
            (Family::CompleteGraphEdges, 3, 5),
            (Family::ArithmeticProgressions, 3, 7),
            (Family::OrderInjections, 3, 6),
        ] {
            let r = &fam.goodness_audit(big, &[n]).unwrap()[0];
            assert_eq!(r.intersect_count, naive_intersections(fam, big, n), "{fam}");
            assert_eq!(r.embedding_count, fam.embeddings(big, n).unwrap().count() as u128);
        }
    }

    #[test]
    fn goodness_ratio_trends() {
        let reports = Family::HypercubeVertices.goodness_audit(2, &[4, 5, 6]).unwrap();
        let r3: Vec<Ratio<u128>> = reports.iter().map(|r| r.ratio_cond3).collect();
        assert!(r3.windows(2).all(|w| w[0] > w[1]), "{r3:?}");

        let reports = Family::CompleteGraphEdges.goodness_audit(3, &[3, 4, 5]).unwrap();
        let r2: Vec<Ratio<u128>> = reports.iter().map(|r| r.ratio_cond2).collect();
        assert_eq!(r2, vec![Ratio::from_integer(2), Ratio::from_integer(4), Ratio::from_integer(6)]);

        // |E(K_2)| = 1: one embedding per edge
        let reports = Family::CompleteGraphEdges.goodness_audit(2, &[3, 4, 5]).unwrap();
        assert!(reports.iter().all(|r| r.ratio_cond2 == Ratio::from_integer(1)));
    }

    #[test]
    fn homogeneity_examples() {
        assert!(Family::CompleteGraphEdges.homogeneity(3, 4).unwrap().homogeneous);
        assert!(Family::HypercubeVertices.homogeneity(1, 3).unwrap().homogeneous);
        let ap = Family::ArithmeticProgressions.homogeneity(2, 4).unwrap();
        assert!(!ap.homogeneous);
        assert!(ap.per_coord[0] < ap.per_coord[1]);
    }

    #[test]
    fn homogeneity_exhaustive_small() {
        for n in 1..=5 {
            for big in 1..=n {
                assert!(Family::HypercubeVertices.homogeneity(big, n).unwrap().homogeneous, "Q {big},{n}");
                if big >= 2 {
                    assert!(Family::CompleteGraphEdges.homogeneity(big, n).unwrap().homogeneous, "K {big},{n}");
                }
            }
        }
        assert!(!Family::CompleteGraphEdges.homogeneity(1, 3).unwrap().homogeneous);
    }

    #[test]
    fn family_spec_json() {
        let spec = FamilySpec {
            kind: Family::HypercubeVertices,
            source: 1,
            n: 3,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"kind":"hypercube-vertices","N":1,"n":3}"#);
        assert_eq!(serde_json::from_str::<FamilySpec>(&text).unwrap(), spec);
        let e = Family::OrderInjections.embedding_at(2, 4, 0).unwrap();
        assert_eq!(serde_json::to_string(&e.map).unwrap(), "[0,1]");
    }
}
