use num_bigint::BigUint;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use super::interval::IntervalSet;
use super::simple::SimpleBox;
use super::{check_lift, check_projection, Body, CellClass, Projectable};
use crate::error::{Error, Result};
use crate::ssee::{Embedding, Family};

/// Largest supported grid resolution (cell sets are `u64` bitmasks).
pub const MAX_GRID: u32 = 64;

/// Box whose coordinates are unions of grid cells `[j/k, (j+1)/k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KRationalBox {
    family: Family,
    level: u32,
    k: u32,
    cells: Vec<u64>,
}

pub(crate) fn full_mask(k: u32) -> u64 {
    if k == 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

pub(crate) fn check_grid(k: u32) -> Result<()> {
    if k == 0 || k > MAX_GRID {
        return Err(Error::Parameter(format!("grid resolution k={k} outside 1..={MAX_GRID}")));
    }
    Ok(())
}

/// Cell index of a coordinate value; 1 falls in the last cell.
pub fn cell_of(x: f64, k: u32) -> u32 {
    ((x * k as f64).floor() as i64).clamp(0, k as i64 - 1) as u32
}

impl KRationalBox {
    pub fn new(family: Family, level: u32, k: u32, cells: Vec<u64>) -> Result<Self> {
        check_grid(k)?;
        let dim = family.dimension(level)?;
        if cells.len() != dim {
            return Err(Error::Parameter(format!(
                "k-rational box at level {level} of {family} needs {dim} coordinates, got {}",
                cells.len()
            )));
        }
        if cells.iter().any(|&m| m & !full_mask(k) != 0) {
            return Err(Error::Parameter(format!("cell bitset wider than k={k}")));
        }
        Ok(Self { family, level, k, cells })
    }

    pub fn full(family: Family, level: u32, k: u32) -> Result<Self> {
        check_grid(k)?;
        let dim = family.dimension(level)?;
        Self::new(family, level, k, vec![full_mask(k); dim])
    }

    /// The single grid cell with the given per-coordinate indices.
    pub fn cell(family: Family, level: u32, k: u32, cells: &[u32]) -> Result<Self> {
        if cells.iter().any(|&j| j >= k) {
            return Err(Error::Parameter(format!("cell index outside 0..{k}")));
        }
        Self::new(family, level, k, cells.iter().map(|&j| 1u64 << j).collect())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn masks(&self) -> &[u64] {
        &self.cells
    }

    pub fn dimension(&self) -> usize {
        self.cells.len()
    }

    /// Number of grid cells in the box.
    pub fn cell_count(&self) -> BigUint {
        self.cells
            .iter()
            .fold(BigUint::one(), |acc, m| acc * BigUint::from(m.count_ones()))
    }

    pub fn volume(&self) -> BigRational {
        let denom = num_traits::pow(BigUint::from(self.k), self.cells.len());
        BigRational::new(self.cell_count().into(), denom.into())
    }

    pub fn volume_f64(&self) -> f64 {
        self.cells.iter().map(|m| m.count_ones() as f64 / self.k as f64).product()
    }

    /// `-ln vol` in nats; `+inf` when some coordinate is empty. Terms are
    /// summed by cell count, so permuting coordinates or adding full ones
    /// leaves the value bit-identical.
    pub fn entropy(&self) -> f64 {
        let mut counts = [0u32; 65];
        for m in &self.cells {
            counts[m.count_ones() as usize] += 1;
        }
        if counts[0] > 0 {
            return f64::INFINITY;
        }
        let ln_k = (self.k as f64).ln();
        (1..=self.k as usize)
            .filter(|&c| counts[c] > 0)
            .map(|c| counts[c] as f64 * (ln_k - (c as f64).ln()))
            .sum::<f64>()
            .max(0.0)
    }

    pub fn density(&self) -> f64 {
        let ent = self.entropy();
        if ent.is_infinite() {
            0.0
        } else {
            (-ent / self.cells.len().max(1) as f64).exp()
        }
    }

    pub fn is_null(&self) -> bool {
        self.cells.iter().any(|&m| m == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.family != other.family || self.level != other.level || self.k != other.k {
            return Err(Error::Parameter("k-rational boxes differ in family, level or resolution".into()));
        }
        Ok(())
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| a & b).collect(),
            ..self.clone()
        })
    }

    /// Exact `vol(self \ other)`.
    pub fn difference_volume(&self, other: &Self) -> Result<BigRational> {
        let meet = self.intersect(other)?;
        let meet_volume = if meet.is_null() { BigRational::zero() } else { meet.volume() };
        let own = if self.is_null() { BigRational::zero() } else { self.volume() };
        Ok(own - meet_volume)
    }

    /// Whether every cell of `self` lies in `other` (for non-null `self`).
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.is_null() || self.cells.iter().zip(&other.cells).all(|(a, b)| a & !b == 0)
    }

    /// Same box with rational interval endpoints.
    pub fn to_simple(&self) -> SimpleBox<Rational64> {
        let k = self.k as i64;
        let coords = self
            .cells
            .iter()
            .map(|&mask| {
                let mut pieces = Vec::new();
                let mut j = 0i64;
                while j < k {
                    if mask >> j & 1 == 1 {
                        let start = j;
                        while j < k && mask >> j & 1 == 1 {
                            j += 1;
                        }
                        pieces.push((Rational64::new(start, k), Rational64::new(j, k)));
                    } else {
                        j += 1;
                    }
                }
                IntervalSet::from_intervals(pieces).expect("grid intervals lie in [0,1]")
            })
            .collect();
        SimpleBox::new(self.family, self.level, coords).expect("same dimension")
    }

    /// Calls `f` with the cell indices of every grid cell in the box, in
    /// lexicographic order. Refuses boxes with more than `budget` cells.
    pub fn for_each_cell(&self, budget: u64, mut f: impl FnMut(&[u32])) -> Result<()> {
        let count = self.cell_count();
        if count > BigUint::from(budget) {
            return Err(Error::Budget(format!("box has {count} cells, budget {budget}")));
        }
        if self.is_null() {
            return Ok(());
        }
        let options: Vec<Vec<u32>> = self
            .cells
            .iter()
            .map(|&m| (0..self.k).filter(|j| m >> j & 1 == 1).collect())
            .collect();
        let mut pos = vec![0usize; options.len()];
        let mut current: Vec<u32> = options.iter().map(|o| o[0]).collect();
        loop {
            f(&current);
            let mut q = options.len();
            loop {
                if q == 0 {
                    return Ok(());
                }
                q -= 1;
                pos[q] += 1;
                if pos[q] < options[q].len() {
                    current[q] = options[q][pos[q]];
                    break;
                }
                pos[q] = 0;
                current[q] = options[q][0];
            }
        }
    }
}

impl Body for KRationalBox {
    fn family(&self) -> Family {
        self.family
    }

    fn level(&self) -> u32 {
        self.level
    }

    fn contains(&self, point: &[f64]) -> bool {
        self.cells
            .iter()
            .zip(point)
            .all(|(&m, &x)| (0.0..=1.0).contains(&x) && m >> cell_of(x, self.k) & 1 == 1)
    }

    fn classify_cell(&self, k: u32, cells: &[u32]) -> CellClass {
        if k == self.k {
            let mut inside = true;
            for (&m, &j) in self.cells.iter().zip(cells) {
                if m >> j & 1 == 0 {
                    inside = false;
                    break;
                }
            }
            if inside {
                return CellClass::Inside;
            }
            return CellClass::Outside;
        }
        self.to_simple().classify_cell(k, cells)
    }
}

impl Projectable for KRationalBox {
    fn project(&self, emb: &Embedding) -> Result<Self> {
        check_projection(self.family, self.level, emb)?;
        let mut on_image = vec![false; self.cells.len()];
        for &c in &emb.map {
            on_image[c as usize] = true;
        }
        let null_off = self.cells.iter().zip(&on_image).any(|(&m, &hit)| !hit && m == 0);
        let cells = if null_off {
            vec![0; emb.map.len()]
        } else {
            emb.map.iter().map(|&c| self.cells[c as usize]).collect()
        };
        KRationalBox::new(self.family, emb.source, self.k, cells)
    }

    fn lift(&self, emb: &Embedding) -> Result<Self> {
        check_lift(self.family, self.level, emb)?;
        let mut lifted = KRationalBox::full(self.family, emb.target, self.k)?;
        for (i, &c) in emb.map.iter().enumerate() {
            lifted.cells[c as usize] = self.cells[i];
        }
        Ok(lifted)
    }
}
