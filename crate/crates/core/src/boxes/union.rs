use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::interval::Scalar;
use super::krational::{KRationalBox, MAX_GRID};
use super::simple::SimpleBox;
use super::{Body, CellClass};
use crate::error::{Error, Result};
use crate::sampling::{count_hits, Proportion};
use crate::ssee::Family;

/// Member limit for exact union volumes.
pub const EXACT_UNION_MAX_MEMBERS: usize = 64;
/// Dimension limit for exact union volumes.
pub const EXACT_UNION_MAX_DIM: usize = 24;
/// Recursion nodes allowed in one exact union computation.
const EXACT_NODE_BUDGET: u64 = 10_000_000;

/// Finite union of bodies at a common level.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxUnion<B> {
    members: Vec<B>,
}

impl<B> Default for BoxUnion<B> {
    fn default() -> Self {
        Self { members: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnionVolumeMode {
    Exact,
    MonteCarlo,
    /// Exact when the union is within the exact limits, sampled otherwise.
    Auto,
}

/// A union volume with its provenance: exact (`exact` holds `p/q`) or
/// sampled (`proportion` holds the hit counts and Wilson interval).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnionVolume {
    pub value: f64,
    pub exact: Option<String>,
    pub proportion: Option<Proportion>,
    pub seed: Option<u64>,
}

impl UnionVolume {
    fn from_exact(v: &BigRational) -> Self {
        Self {
            value: v.to_f64().unwrap_or(f64::NAN),
            exact: Some(format!("{}/{}", v.numer(), v.denom())),
            proportion: None,
            seed: None,
        }
    }
}

impl<B: Body> BoxUnion<B> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn members(&self) -> &[B] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn check_member(&self, b: &B) -> Result<()> {
        if let Some(first) = self.members.first() {
            if first.family() != b.family() || first.level() != b.level() {
                return Err(Error::Parameter("union members must share family and level".into()));
            }
        }
        Ok(())
    }

    pub fn push(&mut self, b: B) -> Result<()> {
        self.check_member(&b)?;
        self.members.push(b);
        Ok(())
    }

    pub fn family(&self) -> Option<Family> {
        self.members.first().map(Body::family)
    }

    pub fn level(&self) -> Option<u32> {
        self.members.first().map(Body::level)
    }

    /// Point-in-union sampling with a Wilson 95% interval.
    pub fn volume_mc(&self, samples: u64, seed: u64, workers: usize) -> UnionVolume {
        let dim = self.members.first().map_or(0, |b| b.family().dimension(b.level()).unwrap_or(0));
        let hits = count_hits(dim, samples, seed, workers, |p| self.contains(p));
        let proportion = Proportion::new(hits, samples);
        UnionVolume {
            value: proportion.estimate,
            exact: None,
            proportion: Some(proportion),
            seed: Some(seed),
        }
    }
}

impl<B: Body + PartialEq> BoxUnion<B> {
    /// Adds `b` unless an equal member is already present.
    pub fn push_unique(&mut self, b: B) -> Result<bool> {
        self.check_member(&b)?;
        if self.members.contains(&b) {
            return Ok(false);
        }
        self.members.push(b);
        Ok(true)
    }
}

impl<B: Body> Body for BoxUnion<B> {
    fn family(&self) -> Family {
        self.members.first().map_or(Family::OrderInjections, Body::family)
    }

    fn level(&self) -> u32 {
        self.members.first().map_or(0, Body::level)
    }

    fn contains(&self, point: &[f64]) -> bool {
        self.members.iter().any(|b| b.contains(point))
    }

    /// Inside if some member contains the cell; Outside if every member
    /// misses it; Boundary otherwise (a conservative answer when several
    /// partial members jointly cover the cell).
    fn classify_cell(&self, k: u32, cells: &[u32]) -> CellClass {
        let mut partial = false;
        for b in &self.members {
            match b.classify_cell(k, cells) {
                CellClass::Inside => return CellClass::Inside,
                CellClass::Boundary => partial = true,
                CellClass::Outside => {}
            }
        }
        if partial {
            CellClass::Boundary
        } else {
            CellClass::Outside
        }
    }
}

impl BoxUnion<KRationalBox> {
    fn within_exact_limits(&self) -> bool {
        self.members.len() <= EXACT_UNION_MAX_MEMBERS
            && self.members.first().map_or(0, |b| b.dimension()) <= EXACT_UNION_MAX_DIM
    }

    /// Exact volume by recursive per-coordinate refinement: at each
    /// coordinate the grid cells are grouped by the set of still-active
    /// members containing them.
    pub fn volume_exact(&self) -> Result<BigRational> {
        let Some(first) = self.members.first() else {
            return Ok(BigRational::zero());
        };
        let k = first.k();
        if self.members.iter().any(|b| b.k() != k) {
            return Err(Error::Mode("exact union volume needs a common grid resolution".into()));
        }
        if !self.within_exact_limits() {
            return Err(Error::Capacity(format!(
                "exact union volume limited to {EXACT_UNION_MAX_MEMBERS} members and dimension {EXACT_UNION_MAX_DIM}"
            )));
        }
        let live: Vec<&KRationalBox> = self.members.iter().filter(|b| !b.is_null()).collect();
        if live.is_empty() {
            return Ok(BigRational::zero());
        }
        let all = if live.len() == 64 { u64::MAX } else { (1u64 << live.len()) - 1 };
        let mut walk = ExactWalk {
            members: &live,
            k,
            dim: first.dimension(),
            memo: HashMap::new(),
            nodes: 0,
        };
        walk.covered(0, all)
    }

    pub fn volume(&self, mode: UnionVolumeMode, samples: u64, seed: u64, workers: usize) -> Result<UnionVolume> {
        match mode {
            UnionVolumeMode::Exact => self.volume_exact().map(|v| UnionVolume::from_exact(&v)),
            UnionVolumeMode::MonteCarlo => Ok(self.volume_mc(samples, seed, workers)),
            UnionVolumeMode::Auto => {
                let same_k = self.members.windows(2).all(|w| w[0].k() == w[1].k());
                if same_k && self.within_exact_limits() {
                    match self.volume_exact() {
                        Ok(v) => return Ok(UnionVolume::from_exact(&v)),
                        Err(Error::Budget(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
                Ok(self.volume_mc(samples, seed, workers))
            }
        }
    }
}

struct ExactWalk<'a> {
    members: &'a [&'a KRationalBox],
    k: u32,
    dim: usize,
    memo: HashMap<(usize, u64), BigRational>,
    nodes: u64,
}

impl ExactWalk<'_> {
    /// Measure of the points of coordinates `q..` covered by some member in
    /// `active` (members already known to contain coordinates `..q`).
    fn covered(&mut self, q: usize, active: u64) -> Result<BigRational> {
        if active == 0 {
            return Ok(BigRational::zero());
        }
        if q == self.dim {
            return Ok(BigRational::from_integer(1.into()));
        }
        // one active member full on every remaining coordinate covers all
        let full = super::krational::full_mask(self.k);
        let mut bits = active;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if self.members[i].masks()[q..].iter().all(|&m| m == full) {
                return Ok(BigRational::from_integer(1.into()));
            }
        }
        if let Some(v) = self.memo.get(&(q, active)) {
            return Ok(v.clone());
        }
        self.nodes += 1;
        if self.nodes > EXACT_NODE_BUDGET {
            return Err(Error::Budget(format!("exact union volume exceeded {EXACT_NODE_BUDGET} refinement nodes")));
        }
        let mut groups: Vec<(u64, u32)> = Vec::new();
        for j in 0..self.k {
            let mut next = 0u64;
            let mut bits = active;
            while bits != 0 {
                let i = bits.trailing_zeros();
                bits &= bits - 1;
                if self.members[i as usize].masks()[q] >> j & 1 == 1 {
                    next |= 1 << i;
                }
            }
            if next == 0 {
                continue;
            }
            match groups.iter_mut().find(|g| g.0 == next) {
                Some(g) => g.1 += 1,
                None => groups.push((next, 1)),
            }
        }
        let mut total = BigRational::zero();
        for (next, count) in groups {
            let sub = self.covered(q + 1, next)?;
            total += sub * BigRational::new(count.into(), self.k.into());
        }
        self.memo.insert((q, active), total.clone());
        Ok(total)
    }
}

impl<T: Scalar> BoxUnion<SimpleBox<T>> {
    /// Grid form of every member at the least common grid, when all
    /// endpoints are rationals with denominators dividing some `k <= 64`.
    pub fn to_k_rational(&self) -> Result<BoxUnion<KRationalBox>> {
        if !T::EXACT {
            return Err(Error::Mode("exact union volume needs exact rational endpoints".into()));
        }
        let mut k = BigInt::from(1);
        for b in &self.members {
            for set in b.coords() {
                for &(lo, hi) in set.intervals() {
                    for x in [lo, hi] {
                        k = k.lcm(x.to_big_rational().denom());
                    }
                }
            }
        }
        let k = k
            .to_u32()
            .filter(|&k| k <= MAX_GRID)
            .ok_or_else(|| Error::Mode(format!("endpoint denominators need a grid finer than {MAX_GRID}")))?;
        let mut out = BoxUnion::new();
        for b in &self.members {
            out.push(b.to_k_rational(k)?)?;
        }
        Ok(out)
    }

    pub fn volume(&self, mode: UnionVolumeMode, samples: u64, seed: u64, workers: usize) -> Result<UnionVolume> {
        match mode {
            UnionVolumeMode::MonteCarlo => Ok(self.volume_mc(samples, seed, workers)),
            UnionVolumeMode::Exact => self.to_k_rational()?.volume(mode, samples, seed, workers),
            UnionVolumeMode::Auto => match self.to_k_rational() {
                Ok(u) => u.volume(mode, samples, seed, workers),
                Err(Error::Mode(_)) => Ok(self.volume_mc(samples, seed, workers)),
                Err(e) => Err(e),
            },
        }
    }
}

impl BoxUnion<SimpleBox<Rational64>> {
    pub fn to_f64_union(&self) -> BoxUnion<SimpleBox<f64>> {
        BoxUnion {
            members: self.members.iter().map(|b| b.to_f64_box()).collect(),
        }
    }
}
