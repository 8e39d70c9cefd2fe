//! Discretised containers for hereditary bodies.
//!
//! A body is approximated from inside by `k`-rational cells, the cells become
//! a family `F` of forbidden colourings of `V_N`, and a greedy cover of the
//! colourings of `V_n` avoiding `F` yields templates whose boxes contain the
//! body at level `n`.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boxes::{cell_of, Body, BoxUnion, CellClass, KRationalBox, Template};
use crate::error::{Error, Result};
use crate::properties::{Exactness, Property};
use crate::rng::{derive_seed, stream};
use crate::sampling::{count_indexed, Proportion};
use crate::ssee::{Embedding, Family};

/// Probes per container when estimating badness.
pub const DEFAULT_BADNESS_PROBES: u64 = 10_000;
/// Default cap on cells, colourings or (embedding, colouring) checks.
pub const DEFAULT_CONTAINER_BUDGET: u64 = 1 << 24;

/// Outside cells of a property at level `N`, merged along the last
/// coordinate.
#[derive(Clone, Debug)]
pub struct InnerApprox {
    pub family: Family,
    pub level: u32,
    pub k: u32,
    pub union: BoxUnion<KRationalBox>,
    pub total_cells: u64,
    pub outside_cells: u64,
    pub boundary_cells: u64,
}

impl InnerApprox {
    /// Volume of the union.
    pub fn volume(&self) -> f64 {
        self.outside_cells as f64 / self.total_cells as f64
    }

    /// Measure of the Boundary cells, an upper bound on `vol(b \ b~)`.
    pub fn boundary_measure(&self) -> f64 {
        self.boundary_cells as f64 / self.total_cells as f64
    }
}

fn cell_total(k: u32, dim: usize, budget: u64) -> Result<u64> {
    (k as u64)
        .checked_pow(dim as u32)
        .filter(|&t| t <= budget)
        .ok_or_else(|| Error::Budget(format!("{k}^{dim} cells exceed budget {budget}")))
}

/// Steps a 0-based odometer over `[0, k)^d`; false once it wraps.
fn advance(digits: &mut [u32], k: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < k {
            return true;
        }
        *d = 0;
    }
    false
}

/// `b~`: the union of the grid cells lying outside `P_N`, i.e. inside the
/// forbidden body `b = [0,1]^{V_N} \ P_N`.
pub fn k_rational_inner_approx(property: &dyn Property, level: u32, k: u32, budget: u64) -> Result<InnerApprox> {
    if property.exactness_at(level) != Exactness::Exact {
        return Err(Error::NotExact(format!(
            "{} has no exact cell classification at level {level}",
            property.descriptor().label()
        )));
    }
    let family = property.family();
    let dim = family.dimension(level)?;
    let total = cell_total(k, dim, budget)?;
    let mut groups: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    let (mut outside, mut boundary) = (0, 0);
    let mut cells = vec![0u32; dim];
    loop {
        match property.classify_cell(level, k, &cells) {
            CellClass::Outside => {
                outside += 1;
                *groups.entry(cells[..dim - 1].to_vec()).or_insert(0) |= 1 << cells[dim - 1];
            }
            CellClass::Boundary => boundary += 1,
            CellClass::Inside => {}
        }
        if !advance(&mut cells, k) {
            break;
        }
    }
    let mut union = BoxUnion::new();
    for (prefix, last) in groups {
        let mut masks: Vec<u64> = prefix.iter().map(|&j| 1 << j).collect();
        masks.push(last);
        union.push(KRationalBox::new(family, level, k, masks)?)?;
    }
    Ok(InnerApprox {
        family,
        level,
        k,
        union,
        total_cells: total,
        outside_cells: outside,
        boundary_cells: boundary,
    })
}

/// `[0,1]^{V_N} \ P_N` as a body.
pub struct Complement<'a> {
    property: &'a dyn Property,
    level: u32,
}

impl<'a> Complement<'a> {
    pub fn new(property: &'a dyn Property, level: u32) -> Self {
        Self { property, level }
    }
}

impl Body for Complement<'_> {
    fn family(&self) -> Family {
        self.property.family()
    }

    fn level(&self) -> u32 {
        self.level
    }

    fn contains(&self, point: &[f64]) -> bool {
        !self.property.contains(self.level, point)
    }

    fn classify_cell(&self, k: u32, cells: &[u32]) -> CellClass {
        match self.property.classify_cell(self.level, k, cells) {
            CellClass::Inside => CellClass::Outside,
            CellClass::Outside => CellClass::Inside,
            CellClass::Boundary => CellClass::Boundary,
        }
    }
}

/// Colourings of `V_N` (1-based colours) whose grid cell lies in `b~`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenFamily {
    pub family: Family,
    pub level: u32,
    pub k: u32,
    pub colourings: BTreeSet<Vec<u32>>,
}

impl ForbiddenFamily {
    pub fn new(family: Family, level: u32, k: u32, colourings: BTreeSet<Vec<u32>>) -> Result<Self> {
        let dim = family.dimension(level)?;
        if colourings.iter().any(|c| c.len() != dim || c.iter().any(|&x| x == 0 || x > k)) {
            return Err(Error::Parameter(format!("forbidden colourings must be {dim} colours from [1,{k}]")));
        }
        Ok(Self {
            family,
            level,
            k,
            colourings,
        })
    }

    pub fn len(&self) -> usize {
        self.colourings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colourings.is_empty()
    }

    /// Whether no pull-back of `colouring` (level `n`) is forbidden.
    pub fn avoided_by(&self, colouring: &[u32], embeddings: &[Embedding]) -> bool {
        let mut pulled = Vec::new();
        embeddings.iter().all(|e| {
            pulled.clear();
            pulled.extend(e.map.iter().map(|&c| colouring[c as usize]));
            !self.colourings.contains(&pulled)
        })
    }
}

/// Every colouring whose product cell lies in a member of `b~`.
pub fn forbidden_family(btilde: &BoxUnion<KRationalBox>, family: Family, level: u32, k: u32, budget: u64) -> Result<ForbiddenFamily> {
    let mut remaining = budget;
    let mut colourings = BTreeSet::new();
    for b in btilde.members() {
        if b.family() != family || b.level() != level || b.k() != k {
            return Err(Error::Parameter("union members must share family, level and k".into()));
        }
        b.for_each_cell(remaining, |cells| {
            colourings.insert(cells.iter().map(|&j| j + 1).collect::<Vec<u32>>());
        })?;
        let used = u64::try_from(b.cell_count()).unwrap_or(u64::MAX);
        remaining = remaining.saturating_sub(used);
    }
    ForbiddenFamily::new(family, level, k, colourings)
}

fn embeddings_within(f: &ForbiddenFamily, n: u32, budget: u64) -> Result<Vec<Embedding>> {
    Ok(f.family.embeddings_with_budget(f.level, n, budget as u128)?.collect())
}

/// All colourings of `V_n` with no pull-back in `F`, lexicographically.
pub fn forb_colourings(f: &ForbiddenFamily, n: u32, budget: u64) -> Result<Vec<Vec<u32>>> {
    let dim = f.family.dimension(n)?;
    let total = cell_total(f.k, dim, budget)?;
    let embeddings = embeddings_within(f, n, budget)?;
    if (total as u128) * (embeddings.len() as u128) > budget as u128 * 16 {
        return Err(Error::Budget(format!(
            "{total} colourings against {} embeddings exceed budget {budget}",
            embeddings.len()
        )));
    }
    let mut out = Vec::new();
    let mut digits = vec![0u32; dim];
    loop {
        let colouring: Vec<u32> = digits.iter().map(|&d| d + 1).collect();
        if f.avoided_by(&colouring, &embeddings) {
            out.push(colouring);
        }
        if !advance(&mut digits, f.k) {
            return Ok(out);
        }
    }
}

/// Fraction of pairs `(phi, c in F)` with `c` realised by `t` pulled back
/// along `phi`.
pub fn template_badness(t: &Template, f: &ForbiddenFamily, embeddings: &[Embedding]) -> f64 {
    if f.is_empty() || embeddings.is_empty() {
        return 0.0;
    }
    let masks = t.masks();
    let realised: usize = embeddings
        .iter()
        .map(|e| {
            f.colourings
                .iter()
                .filter(|c| e.map.iter().zip(c.iter()).all(|(&v, &col)| masks[v as usize] >> (col - 1) & 1 == 1))
                .count()
        })
        .sum();
    realised as f64 / (embeddings.len() * f.len()) as f64
}

/// `c^t`, the union of grid cells of the realisations of `t`.
pub fn template_container_box(t: &Template) -> KRationalBox {
    t.to_box()
}

/// Greedy cover of the colourings avoiding `F` at level `n`. Each template
/// starts as the first uncovered colouring and gains colours coordinate by
/// coordinate (coordinates in a seeded order, colours ascending) while its
/// badness stays at most `epsilon`. Badness only grows as colours are
/// added, so one pass per template suffices.
pub fn build_containers_desk_scale(f: &ForbiddenFamily, n: u32, epsilon: f64, seed: u64, budget: u64) -> Result<Vec<Template>> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Parameter(format!("epsilon {epsilon} outside [0,1]")));
    }
    let embeddings = embeddings_within(f, n, budget)?;
    let targets = forb_colourings(f, n, budget)?;
    let dim = f.family.dimension(n)?;
    let mut covered = vec![false; targets.len()];
    let mut out = Vec::new();
    while let Some(first) = covered.iter().position(|&c| !c) {
        let mut t = Template::from_colouring(f.family, n, f.k, &targets[first])?;
        let mut order: Vec<usize> = (0..dim).collect();
        order.shuffle(&mut stream(seed, out.len() as u64));
        let mut masks = t.masks().to_vec();
        for &v in &order {
            for colour in 0..f.k {
                if masks[v] >> colour & 1 == 1 {
                    continue;
                }
                masks[v] |= 1 << colour;
                let trial = Template::new(f.family, n, f.k, masks.clone())?;
                if template_badness(&trial, f, &embeddings) <= epsilon {
                    t = trial;
                } else {
                    masks[v] &= !(1 << colour);
                }
            }
        }
        for (i, c) in targets.iter().enumerate() {
            if !covered[i] && t.contains_colouring(c) {
                covered[i] = true;
            }
        }
        out.push(t);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainerReport {
    pub family_size: usize,
    /// `e^{epsilon |V_n|}`.
    pub size_bound: f64,
    pub size_within_bound: bool,
    /// Sampled points of `P_n` found by rejection.
    pub coverage_points: u64,
    /// Sampled points of `P_n` outside every container.
    pub coverage_violations: u64,
    /// Colourings avoiding `F` that no container covers, when enumerated.
    pub exhaustive_violations: Option<u64>,
    /// Largest estimated probability that `x` uniform in a container and a
    /// uniform embedding `phi` give `x o phi` in `b`.
    pub max_badness: f64,
    /// Standard error of a badness estimate at `epsilon`.
    pub sigma: f64,
    pub badness_within: bool,
    pub epsilon: f64,
    pub probes: u64,
    pub seed: u64,
}

impl ContainerReport {
    pub const CSV_HEADER: [&'static str; 12] = [
        "family_size",
        "size_bound",
        "size_within_bound",
        "coverage_points",
        "coverage_violations",
        "exhaustive_violations",
        "max_badness",
        "sigma",
        "badness_within",
        "epsilon",
        "probes",
        "seed",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.family_size.to_string(),
            self.size_bound.to_string(),
            self.size_within_bound.to_string(),
            self.coverage_points.to_string(),
            self.coverage_violations.to_string(),
            self.exhaustive_violations.map_or(String::new(), |v| v.to_string()),
            self.max_badness.to_string(),
            self.sigma.to_string(),
            self.badness_within.to_string(),
            self.epsilon.to_string(),
            self.probes.to_string(),
            self.seed.to_string(),
        ]
    }
}

fn sample_in_box<R: Rng>(masks: &[u64], k: u32, coord: usize, rng: &mut R) -> f64 {
    let m = masks[coord];
    let choice = rng.gen_range(0..m.count_ones());
    let cell = (0..k).filter(|j| m >> j & 1 == 1).nth(choice as usize).expect("choice within mask");
    (cell as f64 + rng.gen::<f64>()) / k as f64
}

fn in_container(c: &KRationalBox, point: &[f64]) -> bool {
    c.masks().iter().zip(point).all(|(&m, &x)| m >> cell_of(x, c.k()) & 1 == 1)
}

/// Checks coverage of `P_n` by the containers (sampled, and exhaustively
/// over colourings when `forbidden` is given), badness against `body` at
/// level `N`, and the size bound.
#[allow(clippy::too_many_arguments)]
pub fn verify_container_family<B: Body>(
    containers: &[KRationalBox],
    body: &B,
    property: &dyn Property,
    n: u32,
    epsilon: f64,
    probes: u64,
    seed: u64,
    workers: usize,
    forbidden: Option<&ForbiddenFamily>,
) -> Result<ContainerReport> {
    if probes == 0 {
        return Err(Error::Parameter("probes must be positive".into()));
    }
    let family = property.family();
    let dim = family.dimension(n)?;
    if containers.iter().any(|c| c.family() != family || c.level() != n) {
        return Err(Error::Parameter(format!("containers must be boxes over {} at level {n}", family.name())));
    }
    if body.family() != family || body.level() > n {
        return Err(Error::Parameter("forbidden body must sit at a level at most n in the same family".into()));
    }

    let coverage_seed = derive_seed(seed, 0xc0);
    let in_p = |rng: &mut rand_chacha::ChaCha8Rng, x: &mut Vec<f64>| {
        x.clear();
        x.extend((0..dim).map(|_| rng.gen::<f64>()));
        property.contains(n, x)
    };
    let coverage_points = count_indexed(probes, coverage_seed, workers, in_p);
    let coverage_violations = count_indexed(probes, coverage_seed, workers, |rng, x| {
        in_p(rng, x) && !containers.iter().any(|c| in_container(c, x))
    });
    if coverage_points == 0 && !containers.is_empty() {
        return Err(Error::Starvation(format!("no sampled point of P_{n} in {probes} probes")));
    }

    let exhaustive_violations = match forbidden {
        Some(f) => {
            let targets = forb_colourings(f, n, DEFAULT_CONTAINER_BUDGET)?;
            Some(
                targets
                    .iter()
                    .filter(|col| {
                        !containers
                            .iter()
                            .any(|c| c.k() == f.k && c.masks().iter().zip(col.iter()).all(|(&m, &x)| m >> (x - 1) & 1 == 1))
                    })
                    .count() as u64,
            )
        }
        None => None,
    };

    let source = body.level();
    let mut max_badness: f64 = 0.0;
    for (i, c) in containers.iter().enumerate() {
        if c.is_null() {
            continue;
        }
        let hits = count_indexed(probes, derive_seed(seed, i as u64 + 1), workers, |rng, y| {
            let emb = family.sample_embedding(source, n, rng).expect("source level below target");
            y.clear();
            for &v in &emb.map {
                y.push(sample_in_box(c.masks(), c.k(), v as usize, rng));
            }
            body.contains(y)
        });
        max_badness = max_badness.max(hits as f64 / probes as f64);
    }
    let sigma = Proportion::new(0, probes).sigma_at(epsilon);
    let size_bound = (epsilon * dim as f64).exp();
    Ok(ContainerReport {
        family_size: containers.len(),
        size_bound,
        size_within_bound: containers.len() as f64 <= size_bound,
        coverage_points,
        coverage_violations,
        exhaustive_violations,
        max_badness,
        sigma,
        badness_within: max_badness <= epsilon + 3.0 * sigma,
        epsilon,
        probes,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{upper_shadow, IntervalSet, SimpleBox};
    use crate::properties::Forb;

    fn forb_of(b: SimpleBox<f64>) -> Forb<BoxUnion<SimpleBox<f64>>> {
        let mut u = BoxUnion::new();
        u.push(b).unwrap();
        Forb::from_union(u).unwrap()
    }

    fn hypercube_fixture() -> (ForbiddenFamily, SimpleBox<f64>) {
        let fam = Family::HypercubeVertices;
        let f = ForbiddenFamily::new(fam, 1, 2, [vec![1, 1]].into_iter().collect()).unwrap();
        let b = SimpleBox::uniform(fam, 1, IntervalSet::interval(0.0, 0.5).unwrap()).unwrap();
        (f, b)
    }

    #[test]
    fn inner_approximation_of_a_single_coordinate() {
        let fam = Family::CompleteGraphEdges;
        let b = SimpleBox::new(fam, 2, vec![IntervalSet::interval(0.35, 1.0).unwrap()]).unwrap();
        let approx = k_rational_inner_approx(&forb_of(b.clone()), 2, 10, 1000).unwrap();
        assert_eq!(approx.union.len(), 1);
        assert_eq!(approx.union.members()[0].masks(), &[0b11_1111_0000]);
        assert!((approx.volume() - 0.6).abs() < 1e-15);
        assert!((b.volume() - approx.volume() - 0.05).abs() < 1e-12);
        assert!((approx.boundary_measure() - 0.1).abs() < 1e-15);

        let full = SimpleBox::full(fam, 2).unwrap();
        let approx = k_rational_inner_approx(&forb_of(full), 2, 10, 1000).unwrap();
        assert_eq!(approx.outside_cells, 10);
        assert_eq!(approx.boundary_cells, 0);
        let empty = SimpleBox::empty(fam, 2).unwrap();
        assert!(k_rational_inner_approx(&forb_of(empty), 2, 10, 1000).unwrap().union.is_empty());
    }

    #[test]
    fn discretisation_error_is_bounded_by_boundary_cells() {
        let fam = Family::HypercubeVertices;
        let b = SimpleBox::new(
            fam,
            1,
            vec![IntervalSet::interval(0.13, 0.71).unwrap(), IntervalSet::interval(0.0, 0.47).unwrap()],
        )
        .unwrap();
        let approx = k_rational_inner_approx(&forb_of(b.clone()), 1, 8, 1000).unwrap();
        let samples = 200_000;
        let missed = count_indexed(samples, 9, 4, |rng, _| {
            let y = [rng.gen::<f64>(), rng.gen::<f64>()];
            b.contains(&y) && !approx.union.contains(&y)
        });
        let p = Proportion::new(missed, samples);
        assert!(p.estimate <= approx.boundary_measure() + 3.0 * p.std_error.max(1e-12));
        let extra = count_indexed(samples, 10, 4, |rng, _| {
            let y = [rng.gen::<f64>(), rng.gen::<f64>()];
            approx.union.contains(&y) && !b.contains(&y)
        });
        assert_eq!(extra, 0);
    }

    #[test]
    fn forbidden_family_examples() {
        let fam = Family::ArithmeticProgressions;
        let level = 3;
        let dim = fam.dimension(level).unwrap();
        assert_eq!(dim, 3);
        let mut full = BoxUnion::new();
        full.push(KRationalBox::full(fam, level, 4).unwrap()).unwrap();
        assert_eq!(forbidden_family(&full, fam, level, 4, 1000).unwrap().len(), 64);
        let mut single = BoxUnion::new();
        single.push(KRationalBox::cell(fam, level, 4, &[0, 3, 2]).unwrap()).unwrap();
        let f = forbidden_family(&single, fam, level, 4, 1000).unwrap();
        assert_eq!(f.colourings.iter().next().unwrap(), &vec![1, 4, 3]);
        let mut upper = BoxUnion::new();
        upper.push(KRationalBox::new(fam, level, 4, vec![0b1100; 3]).unwrap()).unwrap();
        assert_eq!(forbidden_family(&upper, fam, level, 4, 1000).unwrap().len(), 8);
        assert!(matches!(forbidden_family(&full, fam, level, 4, 10), Err(Error::Budget(_))));
    }

    #[test]
    fn forbidden_colourings_match_the_upper_shadow() {
        // c avoids F exactly when its grid cell misses every lift of b~
        let (f, _) = hypercube_fixture();
        let cell = KRationalBox::cell(f.family, 1, 2, &[0, 0]).unwrap();
        for n in 1..=3 {
            let shadow = upper_shadow(&cell, n).unwrap();
            let avoiding: BTreeSet<Vec<u32>> = forb_colourings(&f, n, 1 << 20).unwrap().into_iter().collect();
            let dim = f.family.dimension(n).unwrap();
            let mut digits = vec![0u32; dim];
            loop {
                let hit = shadow.classify_cell(2, &digits) == CellClass::Inside;
                let colouring: Vec<u32> = digits.iter().map(|d| d + 1).collect();
                assert_eq!(!hit, avoiding.contains(&colouring));
                if !advance(&mut digits, 2) {
                    break;
                }
            }
        }
    }

    #[test]
    fn trivial_builder_cases() {
        let fam = Family::HypercubeVertices;
        let all: BTreeSet<Vec<u32>> = [vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]].into_iter().collect();
        let f = ForbiddenFamily::new(fam, 1, 2, all).unwrap();
        assert!(build_containers_desk_scale(&f, 2, 0.2, 1, 1 << 20).unwrap().is_empty());

        // three of the four edge colourings forbidden
        let f = ForbiddenFamily::new(fam, 1, 2, [vec![1, 1], vec![2, 2], vec![2, 1]].into_iter().collect()).unwrap();
        let targets = forb_colourings(&f, 1, 1 << 20).unwrap();
        assert_eq!(targets, vec![vec![1, 2]]);
        let family = build_containers_desk_scale(&f, 1, 0.0, 1, 1 << 20).unwrap();
        assert_eq!(family, vec![Template::from_colouring(fam, 1, 2, &[1, 2]).unwrap()]);
    }

    #[test]
    fn containers_cover_their_colourings() {
        let (f, _) = hypercube_fixture();
        let family = build_containers_desk_scale(&f, 3, 0.2, 11, 1 << 20).unwrap();
        let embeddings: Vec<Embedding> = f.family.embeddings(1, 3).unwrap().collect();
        let targets = forb_colourings(&f, 3, 1 << 20).unwrap();
        assert_eq!(targets.len(), 35);
        for c in &targets {
            let cell: Vec<u32> = c.iter().map(|x| x - 1).collect();
            let cell = KRationalBox::cell(f.family, 3, 2, &cell).unwrap();
            assert!(family.iter().any(|t| cell.is_subset_of(&template_container_box(t))));
        }
        for t in &family {
            assert!(template_badness(t, &f, &embeddings) <= 0.2);
        }
        let again = build_containers_desk_scale(&f, 3, 0.2, 11, 1 << 20).unwrap();
        assert_eq!(family, again);
    }

    #[test]
    fn hypercube_fixture_passes_verification() {
        let (f, b) = hypercube_fixture();
        let p = forb_of(b.clone());
        let family = build_containers_desk_scale(&f, 3, 0.2, 11, 1 << 20).unwrap();
        let boxes: Vec<KRationalBox> = family.iter().map(template_container_box).collect();
        let report = verify_container_family(&boxes, &b, &p, 3, 0.2, DEFAULT_BADNESS_PROBES, 5, 4, Some(&f)).unwrap();
        assert_eq!(report.coverage_violations, 0);
        assert_eq!(report.exhaustive_violations, Some(0));
        assert!(report.coverage_points > 0);
        assert!(report.badness_within, "{report:?}");
        assert!((report.size_bound - (1.6f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn full_cube_container_is_flagged_as_bad() {
        let (_, b) = hypercube_fixture();
        let p = forb_of(b.clone());
        let full = vec![KRationalBox::full(Family::HypercubeVertices, 3, 2).unwrap()];
        let report = verify_container_family(&full, &b, &p, 3, 0.2, 10_000, 6, 2, None).unwrap();
        assert_eq!(report.coverage_violations, 0);
        // a uniform edge image lands in [0,1/2]^2 with probability 1/4
        assert!((report.max_badness - 0.25).abs() < 4.0 * (0.25f64 * 0.75 / 10_000.0).sqrt());
        assert!(!report.badness_within);
    }

    #[test]
    fn empty_family_for_empty_property() {
        let fam = Family::HypercubeVertices;
        let b = SimpleBox::full(fam, 1).unwrap();
        let p = forb_of(b.clone());
        let report = verify_container_family(&[], &b, &p, 2, 0.2, 1000, 7, 1, None).unwrap();
        assert_eq!(report.coverage_points, 0);
        assert_eq!(report.coverage_violations, 0);
        assert!(report.badness_within && report.size_within_bound);
    }

    #[test]
    fn complement_of_forb_matches_the_body_at_its_level() {
        let (f, b) = hypercube_fixture();
        let p = forb_of(b.clone());
        let comp = Complement::new(&p, 1);
        let approx = k_rational_inner_approx(&p, 1, 2, 100).unwrap();
        assert_eq!(forbidden_family(&approx.union, f.family, 1, 2, 100).unwrap(), f);
        let mut rng = stream(12, 0);
        for _ in 0..1000 {
            let y = [rng.gen::<f64>(), rng.gen::<f64>()];
            assert_eq!(comp.contains(&y), b.contains(&y));
        }
    }
}
