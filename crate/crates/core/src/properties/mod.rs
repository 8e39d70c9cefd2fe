//! Hereditary properties as membership and cell-classification oracles.
//!
//! A property assigns to every level `n` a body `P_n ⊆ [0,1]^{V_n}`. Oracles
//! answer point membership and classify grid cells as wholly inside, wholly
//! outside or straddling `P_n`, each up to null sets.

mod forb;
mod lipschitz;
mod metric;
mod pattern;
mod weighted;

pub use forb::{Forb, FORB_EMBEDDING_BUDGET, FORB_SAMPLED_EMBEDDINGS};
pub use lipschitz::Lipschitz;
pub use metric::Metric;
pub use pattern::{contains_pattern, permutation_from_point, Pattern, PermutationBody};
pub use weighted::Weighted;

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boxes::{BoxJson, BoxUnion, CellClass, SimpleBox};
use crate::error::{Error, Result};
use crate::sampling::count_indexed;
use crate::ssee::Family;

/// Cells a default [`Property::classify_box`] will enumerate before giving
/// up with `Boundary`.
pub const CLASSIFY_BOX_CELL_BUDGET: u64 = 4096;

/// Rejection attempts per accepted point before an audit reports starvation.
pub const MAX_REJECTION_ATTEMPTS: u64 = 1_000_000;

/// How trustworthy a cell classification is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    /// Inside and Outside hold up to null sets.
    Exact,
    /// Cells are judged by their centre point only.
    SampledCenter,
    /// Membership checks a random subset of embeddings.
    SampledEmbeddings,
}

pub trait Property: Send + Sync {
    fn family(&self) -> Family;

    fn descriptor(&self) -> PropertyDescriptor;

    fn exactness(&self) -> Exactness {
        Exactness::Exact
    }

    /// Exactness at a specific level (some oracles degrade at large `n`).
    fn exactness_at(&self, _level: u32) -> Exactness {
        self.exactness()
    }

    fn contains(&self, level: u32, point: &[f64]) -> bool;

    fn classify_cell(&self, level: u32, k: u32, cells: &[u32]) -> CellClass;

    /// Whether a product of cell ranges lies in `P_n` as soon as its hull
    /// does, so feasibility is decided by [`Property::classify_range`].
    fn hull_determined(&self) -> bool {
        false
    }

    /// Classification of `prod_v [lo_v/k, hi_v/k]`, consulting only
    /// constraints whose coordinates are all `assigned` (all when `None`).
    /// `None` when the property has no range classifier.
    fn classify_range(
        &self,
        _level: u32,
        _k: u32,
        _lo: &[u32],
        _hi: &[u32],
        _assigned: Option<&[bool]>,
    ) -> Option<CellClass> {
        None
    }

    /// Classification of the k-rational box with per-coordinate cell masks.
    fn classify_box(&self, level: u32, k: u32, masks: &[u64]) -> CellClass {
        if masks.iter().any(|&m| m == 0) {
            return CellClass::Outside;
        }
        if self.hull_determined() {
            let (lo, hi) = hull_of(masks);
            if self.classify_range(level, k, &lo, &hi, None) == Some(CellClass::Inside) {
                return CellClass::Inside;
            }
        }
        let cells: u128 = masks.iter().map(|m| m.count_ones() as u128).product();
        if cells > CLASSIFY_BOX_CELL_BUDGET as u128 {
            return CellClass::Boundary;
        }
        let options: Vec<Vec<u32>> = masks.iter().map(|&m| (0..k).filter(|j| m >> j & 1 == 1).collect()).collect();
        let mut pos = vec![0usize; masks.len()];
        let mut cell: Vec<u32> = options.iter().map(|o| o[0]).collect();
        let (mut any_in, mut any_out) = (false, false);
        loop {
            match self.classify_cell(level, k, &cell) {
                CellClass::Inside => any_in = true,
                CellClass::Outside => any_out = true,
                CellClass::Boundary => return CellClass::Boundary,
            }
            if any_in && any_out {
                return CellClass::Boundary;
            }
            let mut q = masks.len();
            loop {
                if q == 0 {
                    return if any_in { CellClass::Inside } else { CellClass::Outside };
                }
                q -= 1;
                pos[q] += 1;
                if pos[q] < options[q].len() {
                    cell[q] = options[q][pos[q]];
                    break;
                }
                pos[q] = 0;
                cell[q] = options[q][0];
            }
        }
    }

    /// Necessary condition for a partially chosen box (masks of unassigned
    /// coordinates are ignored) to extend to a box inside `P_n`.
    fn partially_feasible(&self, level: u32, k: u32, masks: &[u64], assigned: &[bool]) -> bool {
        if !self.hull_determined() {
            return true;
        }
        let (lo, hi) = hull_of(masks);
        matches!(self.classify_range(level, k, &lo, &hi, Some(assigned)), Some(CellClass::Inside) | None)
    }
}

/// Per-coordinate cell hull `[lo, hi)` of a mask vector; empty masks give
/// `lo = hi = 0`.
pub fn hull_of(masks: &[u64]) -> (Vec<u32>, Vec<u32>) {
    masks
        .iter()
        .map(|&m| {
            if m == 0 {
                (0, 0)
            } else {
                (m.trailing_zeros(), 64 - m.leading_zeros())
            }
        })
        .unzip()
}

/// JSON description of a built-in property.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PropertyDescriptor {
    Lipschitz { c: f64 },
    Metric,
    Weighted { s: u32, r: f64 },
    Pattern { pi: Vec<u32> },
    Forb { boxes: Vec<BoxJson> },
    /// A user-supplied oracle; cannot be rebuilt from JSON.
    Custom { name: String },
}

impl PropertyDescriptor {
    pub fn build(&self) -> Result<Arc<dyn Property>> {
        Ok(match self {
            PropertyDescriptor::Lipschitz { c } => Arc::new(Lipschitz::new(*c)?),
            PropertyDescriptor::Metric => Arc::new(Metric),
            PropertyDescriptor::Weighted { s, r } => Arc::new(Weighted::new(*s, *r)?),
            PropertyDescriptor::Pattern { pi } => Arc::new(Pattern::new(pi.clone())?),
            PropertyDescriptor::Forb { boxes } => {
                let mut union = BoxUnion::new();
                for b in boxes {
                    union.push(SimpleBox::<f64>::from_json(b)?)?;
                }
                Arc::new(Forb::from_union(union)?)
            }
            PropertyDescriptor::Custom { name } => {
                return Err(Error::Parameter(format!("custom property '{name}' has no built-in oracle")))
            }
        })
    }

    /// Short label for tables, e.g. `weighted(s=3,r=1.5)`.
    pub fn label(&self) -> String {
        match self {
            PropertyDescriptor::Lipschitz { c } => format!("lipschitz(c={c})"),
            PropertyDescriptor::Metric => "metric".into(),
            PropertyDescriptor::Weighted { s, r } => format!("weighted(s={s},r={r})"),
            PropertyDescriptor::Pattern { pi } => {
                let p: Vec<String> = pi.iter().map(|v| v.to_string()).collect();
                format!("pattern({})", p.join(""))
            }
            PropertyDescriptor::Forb { boxes } => format!("forb({} boxes)", boxes.len()),
            PropertyDescriptor::Custom { name } => name.clone(),
        }
    }
}

/// A user-defined membership predicate. Cells are classified by their
/// centre, so the oracle is labelled approximate.
pub struct CenterSampled<F> {
    family: Family,
    name: String,
    membership: F,
}

impl<F> CenterSampled<F>
where
    F: Fn(u32, &[f64]) -> bool + Send + Sync,
{
    pub fn new(family: Family, name: impl Into<String>, membership: F) -> Self {
        Self {
            family,
            name: name.into(),
            membership,
        }
    }
}

impl<F> Property for CenterSampled<F>
where
    F: Fn(u32, &[f64]) -> bool + Send + Sync,
{
    fn family(&self) -> Family {
        self.family
    }

    fn descriptor(&self) -> PropertyDescriptor {
        PropertyDescriptor::Custom { name: self.name.clone() }
    }

    fn exactness(&self) -> Exactness {
        Exactness::SampledCenter
    }

    fn contains(&self, level: u32, point: &[f64]) -> bool {
        (self.membership)(level, point)
    }

    fn classify_cell(&self, level: u32, k: u32, cells: &[u32]) -> CellClass {
        let centre: Vec<f64> = cells.iter().map(|&j| (j as f64 + 0.5) / k as f64).collect();
        if (self.membership)(level, &centre) {
            CellClass::Inside
        } else {
            CellClass::Outside
        }
    }
}

/// Outcome of [`hereditary_audit`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HereditaryAudit {
    #[serde(rename = "N")]
    pub source: u32,
    pub n: u32,
    pub samples: u64,
    pub attempts: u64,
    pub violations: u64,
    pub seed: u64,
}

/// Draws `samples` points of `P_n` by rejection, pulls each back along a
/// uniformly random embedding `V_N -> V_n`, and counts pull-backs outside
/// `P_N`. Hereditary properties give zero.
pub fn hereditary_audit(
    property: &dyn Property,
    source: u32,
    target: u32,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<HereditaryAudit> {
    let family = property.family();
    let dim = family.dimension(target)?;
    family.embedding_count(source, target)?;
    let attempts = AtomicU64::new(0);
    let starved = AtomicBool::new(false);
    let violations = count_indexed(samples, seed, workers, |rng, point| {
        let mut tries = 0u64;
        loop {
            if starved.load(Ordering::Relaxed) {
                return false;
            }
            point.clear();
            point.extend((0..dim).map(|_| rng.gen::<f64>()));
            tries += 1;
            if property.contains(target, point) {
                break;
            }
            if tries >= MAX_REJECTION_ATTEMPTS {
                starved.store(true, Ordering::Relaxed);
                return false;
            }
        }
        attempts.fetch_add(tries, Ordering::Relaxed);
        let emb = family.sample_embedding(source, target, rng).expect("levels checked above");
        !property.contains(source, &emb.pull_back(point))
    });
    if starved.load(Ordering::Relaxed) {
        return Err(Error::Starvation(format!(
            "acceptance below 1e-6 while sampling level {target} of {}",
            property.descriptor().label()
        )));
    }
    Ok(HereditaryAudit {
        source,
        n: target,
        samples,
        attempts: attempts.into_inner(),
        violations,
        seed,
    })
}

/// Counts membership/classification disagreements: `points_per_cell`
/// random points in each of `cells` random cells; a point in an Inside cell
/// must be a member and a point in an Outside cell must not.
pub fn classification_audit(
    property: &dyn Property,
    level: u32,
    k: u32,
    cells: u64,
    points_per_cell: u64,
    seed: u64,
) -> Result<(u64, [u64; 3])> {
    let dim = property.family().dimension(level)?;
    let mut rng = crate::rng::stream(seed, 0);
    let mut mismatches = 0;
    let mut classes = [0u64; 3];
    let mut cell = vec![0u32; dim];
    let mut point = vec![0f64; dim];
    for _ in 0..cells {
        for c in cell.iter_mut() {
            *c = rng.gen_range(0..k);
        }
        let class = property.classify_cell(level, k, &cell);
        classes[class as usize] += 1;
        if class == CellClass::Boundary {
            continue;
        }
        for _ in 0..points_per_cell {
            for (x, &j) in point.iter_mut().zip(&cell) {
                *x = (j as f64 + rng.gen::<f64>()) / k as f64;
            }
            let member = property.contains(level, &point);
            if member != (class == CellClass::Inside) {
                mismatches += 1;
            }
        }
    }
    Ok((mismatches, classes))
}
