//! Extremal entropy: closed forms for the built-in bodies, exact search over
//! grid templates, and monotonicity audits of the normalised values.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::boxes::{BoxJson, CellClass, IntervalSet, SimpleBox, Template, TemplateJson};
use crate::error::{Error, Result};
use crate::properties::{Exactness, Property, PropertyDescriptor};
use crate::ssee::Family;

/// Default node budget for [`grid_extremal`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 50_000_000;

/// The box attaining a reported extremal entropy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Maximizer {
    Template(TemplateJson),
    Box(BoxJson),
}

impl Maximizer {
    pub fn compact(&self) -> String {
        serde_json::to_string(self).expect("maximizer serialises")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalReport {
    pub family: Family,
    pub property: PropertyDescriptor,
    pub n: u32,
    /// Grid resolution searched; 0 for closed forms.
    pub grid_k: u32,
    pub entropy_nats: f64,
    pub volume: f64,
    /// Exact volume `p/q` of the maximizer, when grid-based.
    pub volume_exact: Option<String>,
    pub x_n: f64,
    pub maximizer: Maximizer,
    /// Number of distinct maximizing templates seen (capped).
    pub maximizer_count: usize,
    /// Limiting normalised entropy, when known in closed form.
    pub pi_estimate: Option<f64>,
    pub nodes: u64,
}

impl ExtremalReport {
    pub const CSV_HEADER: [&'static str; 7] = ["family", "property", "n", "k", "entropy_nats", "x_n", "maximizer"];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.family.name().to_string(),
            self.property.label(),
            self.n.to_string(),
            self.grid_k.to_string(),
            format!("{}", self.entropy_nats),
            format!("{}", self.x_n),
            self.maximizer.compact(),
        ]
    }
}

/// Closed-form extremal entropy and box for the Lipschitz, metric and
/// weighted properties.
pub fn analytic_extremal(property: &PropertyDescriptor, n: u32) -> Result<ExtremalReport> {
    let (family, per_coord, lo, hi) = match *property {
        PropertyDescriptor::Lipschitz { c } => {
            crate::properties::Lipschitz::new(c)?;
            (Family::HypercubeVertices, -c.ln(), 0.0, c)
        }
        PropertyDescriptor::Metric => {
            if n < 3 {
                return Err(Error::Precondition("the metric closed form needs n >= 3".into()));
            }
            (Family::CompleteGraphEdges, 2f64.ln(), 0.5, 1.0)
        }
        PropertyDescriptor::Weighted { s, r } => {
            let w = crate::properties::Weighted::new(s, r)?;
            if n < s {
                return Err(Error::Precondition(format!("the weighted closed form needs n >= s = {s}")));
            }
            let pairs = w.pairs() as f64;
            (Family::CompleteGraphEdges, (pairs / r).ln(), 0.0, r / pairs)
        }
        _ => return Err(Error::NoClosedForm(property.label())),
    };
    let dim = family.dimension(n)?;
    let b = SimpleBox::uniform(family, n, IntervalSet::interval(lo, hi)?)?;
    let entropy = per_coord * dim as f64;
    Ok(ExtremalReport {
        family,
        property: property.clone(),
        n,
        grid_k: 0,
        entropy_nats: entropy,
        volume: b.volume(),
        volume_exact: None,
        x_n: per_coord,
        maximizer: Maximizer::Box(b.to_json()),
        maximizer_count: 1,
        pi_estimate: Some(per_coord),
        nodes: 0,
    })
}

/// Search limits for [`grid_extremal_with`].
#[derive(Clone, Copy, Debug)]
pub struct GridOptions {
    pub budget: u64,
    /// How many tied maximizers to keep.
    pub max_ties: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_SEARCH_BUDGET,
            max_ties: 64,
        }
    }
}

/// Largest-volume k-rational box inside `P_n`, with every realised cell
/// classified Inside. Ties go to the lexicographically least template.
pub fn grid_extremal(property: &dyn Property, n: u32, k: u32, budget: u64) -> Result<ExtremalReport> {
    grid_extremal_with(property, n, k, GridOptions { budget, max_ties: 64 }).map(|(r, _)| r)
}

/// As [`grid_extremal`], also returning the tied maximizers found (at most
/// `max_ties`, lexicographically least first).
pub fn grid_extremal_with(
    property: &dyn Property,
    n: u32,
    k: u32,
    options: GridOptions,
) -> Result<(ExtremalReport, Vec<Template>)> {
    let family = property.family();
    let dim = family.dimension(n)?;
    Template::full(family, n, k)?;
    if property.exactness_at(n) != Exactness::Exact {
        return Err(Error::NotExact(format!(
            "{} has no exact cell classification at n={n}",
            property.descriptor().label()
        )));
    }
    if dim as f64 * (k as f64).log2() >= 127.0 {
        return Err(Error::Capacity(format!("k^|V_n| = {k}^{dim} does not fit the search's integer volumes")));
    }
    let hull = property.hull_determined();
    // intervals suffice for hull-determined bodies: a feasible cell set's
    // hull is feasible and no smaller
    let mut cands: Vec<Candidate> = if hull {
        (0..k)
            .flat_map(|lo| (lo + 1..=k).map(move |hi| Candidate::interval(lo, hi)))
            .collect()
    } else {
        if k > 16 {
            return Err(Error::Capacity(format!("general cell-set search supports k <= 16, got {k}")));
        }
        (1..1u64 << k).map(Candidate::mask).collect()
    };
    cands.sort_by(|a, b| b.weight.cmp(&a.weight).then(a.mask.cmp(&b.mask)));

    let mut search = Search {
        property,
        n,
        k,
        hull,
        cands,
        order: tightness_order(property, n, k, dim),
        lo: vec![0; dim],
        hi: vec![k; dim],
        masks: vec![0; dim],
        assigned: vec![false; dim],
        best: 0,
        ties: BTreeSet::new(),
        nodes: 0,
        options,
    };
    search.seed_uniform();
    search.dfs(0, 1)?;
    if search.best == 0 {
        return Err(Error::Precondition(format!("no nonempty k={k} box lies inside the body at n={n}")));
    }
    let templates: Vec<Template> = search
        .ties
        .iter()
        .map(|m| Template::new(family, n, k, m.clone()).expect("search masks are nonempty"))
        .collect();
    let best = &templates[0];
    let kbox = best.to_box();
    let vol = kbox.volume();
    let entropy = kbox.entropy();
    let report = ExtremalReport {
        family,
        property: property.descriptor(),
        n,
        grid_k: k,
        entropy_nats: entropy,
        volume: kbox.volume_f64(),
        volume_exact: Some(format!("{}/{}", vol.numer(), vol.denom())),
        x_n: entropy / dim as f64,
        maximizer: Maximizer::Template(best.to_json()),
        maximizer_count: templates.len(),
        pi_estimate: None,
        nodes: search.nodes,
    };
    Ok((report, templates))
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    mask: u64,
    lo: u32,
    hi: u32,
    weight: u32,
}

impl Candidate {
    fn interval(lo: u32, hi: u32) -> Self {
        let mask = (lo..hi).fold(0u64, |m, j| m | 1 << j);
        Self { mask, lo, hi, weight: hi - lo }
    }

    fn mask(mask: u64) -> Self {
        Self {
            mask,
            lo: mask.trailing_zeros(),
            hi: 64 - mask.leading_zeros(),
            weight: mask.count_ones(),
        }
    }
}

/// Coordinates with the most non-Inside probe cells first. Probe `j` for
/// coordinate `q` puts `q` in cell `j` and every other coordinate in the
/// top cell.
fn tightness_order(property: &dyn Property, n: u32, k: u32, dim: usize) -> Vec<usize> {
    let mut probe = vec![k - 1; dim];
    let mut score: Vec<(usize, usize)> = (0..dim)
        .map(|q| {
            let mut tight = 0;
            for j in 0..k {
                probe[q] = j;
                if property.classify_cell(n, k, &probe) != CellClass::Inside {
                    tight += 1;
                }
            }
            probe[q] = k - 1;
            (q, tight)
        })
        .collect();
    score.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    score.into_iter().map(|(q, _)| q).collect()
}

struct Search<'a> {
    property: &'a dyn Property,
    n: u32,
    k: u32,
    hull: bool,
    cands: Vec<Candidate>,
    order: Vec<usize>,
    lo: Vec<u32>,
    hi: Vec<u32>,
    masks: Vec<u64>,
    assigned: Vec<bool>,
    best: u128,
    ties: BTreeSet<Vec<u64>>,
    nodes: u64,
    options: GridOptions,
}

impl Search<'_> {
    fn set(&mut self, q: usize, c: &Candidate) {
        self.masks[q] = c.mask;
        self.lo[q] = c.lo;
        self.hi[q] = c.hi;
        self.assigned[q] = true;
    }

    fn unset(&mut self, q: usize) {
        self.assigned[q] = false;
        self.masks[q] = 0;
        self.lo[q] = 0;
        self.hi[q] = self.k;
    }

    fn feasible_so_far(&self) -> bool {
        if self.hull {
            self.property
                .classify_range(self.n, self.k, &self.lo, &self.hi, Some(&self.assigned))
                .is_none_or(|c| c == CellClass::Inside)
        } else {
            self.property.partially_feasible(self.n, self.k, &self.masks, &self.assigned)
        }
    }

    fn leaf_inside(&self) -> bool {
        if self.hull {
            self.feasible_so_far()
        } else {
            self.property.classify_box(self.n, self.k, &self.masks) == CellClass::Inside
        }
    }

    fn record(&mut self, value: u128) {
        if value > self.best {
            self.best = value;
            self.ties.clear();
        }
        if value == self.best {
            self.ties.insert(self.masks.clone());
            while self.ties.len() > self.options.max_ties.max(1) {
                self.ties.pop_last();
            }
        }
    }

    /// Incumbent from boxes using one candidate on every coordinate.
    fn seed_uniform(&mut self) {
        let dim = self.masks.len();
        let cands = self.cands.clone();
        for c in &cands {
            for q in 0..dim {
                self.set(q, c);
            }
            let value = (c.weight as u128).pow(dim as u32);
            if value >= self.best && self.leaf_inside() {
                self.record(value);
            }
        }
        for q in 0..dim {
            self.unset(q);
        }
    }

    /// Largest candidate weight coordinate `q` could take next to the
    /// current partial assignment.
    fn max_weight(&mut self, q: usize) -> u32 {
        if !self.hull {
            return self.k;
        }
        let mut found = 0;
        for i in 0..self.cands.len() {
            let c = self.cands[i];
            self.set(q, &c);
            let ok = self.feasible_so_far();
            self.unset(q);
            if ok {
                found = c.weight;
                break;
            }
        }
        found
    }

    fn dfs(&mut self, depth: usize, product: u128) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.options.budget {
            return Err(Error::PartialResult {
                nodes: self.nodes,
                best_volume: self.best as f64 / (self.k as f64).powi(self.masks.len() as i32),
            });
        }
        let dim = self.masks.len();
        if depth == dim {
            if self.leaf_inside() {
                self.record(product);
            }
            return Ok(());
        }
        // per-coordinate optimistic weights for the rest of the order
        let mut rest = Vec::with_capacity(dim - depth);
        for d in depth..dim {
            let w = self.max_weight(self.order[d]);
            if w == 0 {
                return Ok(());
            }
            rest.push(w as u128);
        }
        let tail: u128 = rest[1..].iter().product();
        if product * rest[0] * tail < self.best {
            return Ok(());
        }
        let q = self.order[depth];
        for i in 0..self.cands.len() {
            let c = self.cands[i];
            if product * c.weight as u128 * tail < self.best {
                break;
            }
            self.set(q, &c);
            if self.feasible_so_far() {
                self.dfs(depth + 1, product * c.weight as u128)?;
            }
            self.unset(q);
        }
        Ok(())
    }
}

/// One row of a monotonicity audit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityRow {
    pub n: u32,
    pub entropy_nats: f64,
    pub x_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub family: Family,
    pub property: PropertyDescriptor,
    pub k: u32,
    pub rows: Vec<MonotonicityRow>,
    pub nondecreasing: bool,
    /// First consecutive pair `(n, n')` with `x_n > x_n'`.
    pub counterexample: Option<(u32, u32)>,
}

/// Grid values `x_n` for each level, with a verdict on whether they are
/// nondecreasing. The family must be homogeneous between consecutive levels.
pub fn monotonicity_audit(property: &dyn Property, levels: &[u32], k: u32, budget: u64) -> Result<MonotonicityReport> {
    let family = property.family();
    for w in levels.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Parameter("levels must be strictly increasing".into()));
        }
        if !family.homogeneity(w[0], w[1])?.homogeneous {
            return Err(Error::Precondition(format!(
                "{family} is not homogeneous between levels {} and {}",
                w[0], w[1]
            )));
        }
    }
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let r = grid_extremal(property, n, k, budget)?;
        rows.push(MonotonicityRow {
            n,
            entropy_nats: r.entropy_nats,
            x_n: r.x_n,
        });
    }
    let counterexample = rows
        .windows(2)
        .find(|w| w[0].x_n > w[1].x_n + 1e-12)
        .map(|w| (w[0].n, w[1].n));
    Ok(MonotonicityReport {
        family,
        property: property.descriptor(),
        k,
        rows,
        nondecreasing: counterexample.is_none(),
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::{Lipschitz, Metric, Pattern, Weighted};
    use num_rational::BigRational;

    /// Oracle: every interval template, no pruning.
    fn brute_force_best(property: &dyn Property, n: u32, k: u32) -> u128 {
        let dim = property.family().dimension(n).unwrap();
        let intervals: Vec<(u32, u32)> = (0..k).flat_map(|a| (a + 1..=k).map(move |b| (a, b))).collect();
        let mut idx = vec![0usize; dim];
        let mut best = 0u128;
        loop {
            let lo: Vec<u32> = idx.iter().map(|&i| intervals[i].0).collect();
            let hi: Vec<u32> = idx.iter().map(|&i| intervals[i].1).collect();
            if property.classify_range(n, k, &lo, &hi, None) == Some(CellClass::Inside) {
                best = best.max(lo.iter().zip(&hi).map(|(a, b)| (b - a) as u128).product());
            }
            let mut q = 0;
            loop {
                if q == dim {
                    return best;
                }
                idx[q] += 1;
                if idx[q] < intervals.len() {
                    break;
                }
                idx[q] = 0;
                q += 1;
            }
        }
    }

    fn exact(v: &str) -> BigRational {
        let (p, q) = v.split_once('/').unwrap();
        BigRational::new(p.parse().unwrap(), q.parse().unwrap())
    }

    #[test]
    fn closed_forms() {
        let l = analytic_extremal(&PropertyDescriptor::Lipschitz { c: 0.5 }, 3).unwrap();
        assert!((l.entropy_nats - 8.0 * 2f64.ln()).abs() < 1e-12);
        let m = analytic_extremal(&PropertyDescriptor::Metric, 3).unwrap();
        assert!((m.entropy_nats - 3.0 * 2f64.ln()).abs() < 1e-12);
        let w = analytic_extremal(&PropertyDescriptor::Weighted { s: 3, r: 1.5 }, 3).unwrap();
        assert!((w.entropy_nats - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert!(matches!(
            analytic_extremal(&PropertyDescriptor::Pattern { pi: vec![1, 2] }, 3),
            Err(Error::NoClosedForm(_))
        ));
    }

    #[test]
    fn grid_examples() {
        let m = grid_extremal(&Metric, 3, 8, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(exact(m.volume_exact.as_deref().unwrap()), BigRational::new(1.into(), 8.into()));
        let l = grid_extremal(&Lipschitz::new(0.5).unwrap(), 1, 10, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(exact(l.volume_exact.as_deref().unwrap()), BigRational::new(1.into(), 4.into()));
        let w = grid_extremal(&Weighted::new(3, 1.5).unwrap(), 3, 6, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(exact(w.volume_exact.as_deref().unwrap()), BigRational::new(1.into(), 8.into()));
    }

    #[test]
    fn search_matches_exhaustive_oracle() {
        let props: Vec<(Box<dyn Property>, u32)> = vec![
            (Box::new(Metric), 3),
            (Box::new(Weighted::new(3, 1.2).unwrap()), 3),
            (Box::new(Lipschitz::new(0.35).unwrap()), 1),
            (Box::new(Lipschitz::new(0.5).unwrap()), 2),
        ];
        for (p, n) in &props {
            for k in [3, 4, 5] {
                let dim = p.family().dimension(*n).unwrap();
                let r = grid_extremal(p.as_ref(), *n, k, DEFAULT_SEARCH_BUDGET).unwrap();
                let expected = brute_force_best(p.as_ref(), *n, k);
                let got = (r.volume * (k as f64).powi(dim as i32)).round() as u128;
                assert_eq!(got, expected, "{} n={n} k={k}", p.descriptor().label());
            }
        }
    }

    #[test]
    fn maximizer_cells_are_inside() {
        let (r, ties) = grid_extremal_with(&Metric, 4, 4, GridOptions::default()).unwrap();
        assert!(r.maximizer_count >= 1);
        for t in &ties {
            t.to_box()
                .for_each_cell(1 << 20, |cell| assert_eq!(Metric.classify_cell(4, 4, cell), CellClass::Inside))
                .unwrap();
        }
    }

    #[test]
    fn weighted_maximizer_is_unique_at_representable_k() {
        let p = Weighted::new(3, 1.5).unwrap();
        for (n, k) in [(3, 2), (3, 6), (4, 4)] {
            let (_, ties) = grid_extremal_with(&p, n, k, GridOptions::default()).unwrap();
            assert_eq!(ties.len(), 1, "n={n} k={k}");
            let half = k / 2;
            assert!(ties[0].masks().iter().all(|&m| m == (1u64 << half) - 1));
        }
    }

    #[test]
    fn refinement_never_loses_volume() {
        let props: Vec<Box<dyn Property>> =
            vec![Box::new(Metric), Box::new(Weighted::new(3, 1.5).unwrap()), Box::new(Lipschitz::new(0.5).unwrap())];
        for p in &props {
            let n = 3;
            let coarse = grid_extremal(p.as_ref(), n, 4, DEFAULT_SEARCH_BUDGET).unwrap();
            let fine = grid_extremal(p.as_ref(), n, 8, DEFAULT_SEARCH_BUDGET).unwrap();
            assert!(fine.volume >= coarse.volume);
        }
    }

    #[test]
    fn analytic_and_grid_agree_when_representable() {
        let cases: Vec<(PropertyDescriptor, u32, u32)> = vec![
            (PropertyDescriptor::Metric, 3, 4),
            (PropertyDescriptor::Metric, 4, 2),
            (PropertyDescriptor::Lipschitz { c: 0.5 }, 1, 4),
            (PropertyDescriptor::Lipschitz { c: 0.25 }, 2, 4),
            (PropertyDescriptor::Weighted { s: 3, r: 1.5 }, 3, 6),
        ];
        for (d, n, k) in cases {
            let a = analytic_extremal(&d, n).unwrap();
            let g = grid_extremal(d.build().unwrap().as_ref(), n, k, DEFAULT_SEARCH_BUDGET).unwrap();
            assert!((a.entropy_nats - g.entropy_nats).abs() < 1e-12, "{}", d.label());
        }
    }

    #[test]
    fn monotonicity_examples() {
        let m = monotonicity_audit(&Metric, &[3, 4], 4, DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(m.nondecreasing);
        let l = monotonicity_audit(&Lipschitz::new(0.5).unwrap(), &[1, 2], 4, DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(l.nondecreasing);
        let w = monotonicity_audit(&Weighted::new(3, 1.5).unwrap(), &[3, 4], 6, DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(w.nondecreasing);
        let p = Pattern::new(vec![1, 2]).unwrap();
        let r = grid_extremal(&p, 2, 2, DEFAULT_SEARCH_BUDGET).unwrap();
        // decreasing pairs only: the box [1/2,1] x [0,1/2]
        assert_eq!(r.volume, 0.25);
    }

    #[test]
    fn budget_exhaustion_reports_partial_result() {
        let err = grid_extremal(&Metric, 4, 6, 10).unwrap_err();
        assert!(matches!(err, Error::PartialResult { .. }));
    }
}
