use num_rational::{BigRational, Rational64};
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::interval::{IntervalSet, Scalar};
use super::krational::KRationalBox;
use super::{check_lift, check_projection, Body, CellClass, Projectable};
use crate::error::{Error, Result};
use crate::ssee::{Embedding, Family};

/// Product of finite interval unions, one per coordinate of `V_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimpleBox<T: Scalar = f64> {
    family: Family,
    level: u32,
    coords: Vec<IntervalSet<T>>,
}

impl<T: Scalar> SimpleBox<T> {
    pub fn full(family: Family, level: u32) -> Result<Self> {
        let dim = family.dimension(level)?;
        Ok(Self {
            family,
            level,
            coords: vec![IntervalSet::full(); dim],
        })
    }

    /// All coordinates empty.
    pub fn empty(family: Family, level: u32) -> Result<Self> {
        let dim = family.dimension(level)?;
        Ok(Self {
            family,
            level,
            coords: vec![IntervalSet::empty(); dim],
        })
    }

    pub fn new(family: Family, level: u32, coords: Vec<IntervalSet<T>>) -> Result<Self> {
        let dim = family.dimension(level)?;
        if coords.len() != dim {
            return Err(Error::Parameter(format!(
                "box at level {level} of {family} needs {dim} coordinates, got {}",
                coords.len()
            )));
        }
        Ok(Self { family, level, coords })
    }

    /// Every coordinate equal to `set`.
    pub fn uniform(family: Family, level: u32, set: IntervalSet<T>) -> Result<Self> {
        let dim = family.dimension(level)?;
        Self::new(family, level, vec![set; dim])
    }

    pub fn coords(&self) -> &[IntervalSet<T>] {
        &self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn volume(&self) -> f64 {
        self.coords.iter().map(|c| c.measure().to_f64()).product()
    }

    /// Exact volume as a big rational.
    pub fn volume_exact(&self) -> BigRational {
        self.coords
            .iter()
            .fold(BigRational::one(), |acc, c| acc * c.measure().to_big_rational())
    }

    /// `-ln vol`, accumulated as a sum of logs in sorted order so that the
    /// value does not depend on coordinate order; `+inf` for null boxes.
    pub fn entropy(&self) -> f64 {
        let mut terms = Vec::with_capacity(self.coords.len());
        for c in &self.coords {
            let m = c.measure().to_f64();
            if m <= 0.0 {
                return f64::INFINITY;
            }
            terms.push(-m.ln());
        }
        terms.sort_by(f64::total_cmp);
        terms.iter().sum::<f64>().max(0.0)
    }

    /// `vol^{1/|V_n|}`.
    pub fn density(&self) -> f64 {
        let ent = self.entropy();
        if ent.is_infinite() || self.coords.is_empty() {
            return if ent.is_infinite() { 0.0 } else { 1.0 };
        }
        (-ent / self.coords.len() as f64).exp()
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            family: self.family,
            level: self.level,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.intersect(b)).collect(),
        })
    }

    /// `vol(self \ other)`; boxes intersect in a box, so this is
    /// `vol(self) - vol(self ∩ other)`.
    pub fn difference_volume(&self, other: &Self) -> Result<f64> {
        Ok(self.volume() - self.intersect(other)?.volume())
    }

    pub fn has_null_coordinate(&self) -> bool {
        self.coords.iter().any(|c| c.measure() <= T::zero())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.family != other.family || self.level != other.level {
            return Err(Error::Parameter("boxes live at different levels or families".into()));
        }
        Ok(())
    }

    /// Grid form, when every endpoint is a multiple of `1/k` (within 1e-9).
    pub fn to_k_rational(&self, k: u32) -> Result<KRationalBox> {
        let mut cells = Vec::with_capacity(self.coords.len());
        for set in &self.coords {
            let mut mask = 0u64;
            for &(a, b) in set.intervals() {
                let lo = grid_index(a.to_f64(), k)?;
                let hi = grid_index(b.to_f64(), k)?;
                for j in lo..hi {
                    mask |= 1 << j;
                }
            }
            cells.push(mask);
        }
        KRationalBox::new(self.family, self.level, k, cells)
    }

    pub fn to_json(&self) -> BoxJson {
        BoxJson {
            n: self.level,
            family: self.family,
            coords: self.coords.iter().map(|c| c.to_text()).collect(),
        }
    }

    pub fn from_json(json: &BoxJson) -> Result<Self> {
        let coords = json
            .coords
            .iter()
            .map(|c| IntervalSet::from_text(c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.family, json.n, coords)
    }
}

fn grid_index(x: f64, k: u32) -> Result<u32> {
    let scaled = x * k as f64;
    let j = scaled.round();
    if (scaled - j).abs() > 1e-9 {
        return Err(Error::Conversion(format!("endpoint {x} is not a multiple of 1/{k}")));
    }
    Ok(j as u32)
}

impl SimpleBox<Rational64> {
    pub fn to_f64_box(&self) -> SimpleBox<f64> {
        SimpleBox {
            family: self.family,
            level: self.level,
            coords: self.coords.iter().map(|c| c.to_f64_set()).collect(),
        }
    }
}

impl<T: Scalar> Body for SimpleBox<T> {
    fn family(&self) -> Family {
        self.family
    }

    fn level(&self) -> u32 {
        self.level
    }

    fn contains(&self, point: &[f64]) -> bool {
        self.coords.iter().zip(point).all(|(set, &x)| set.contains(x))
    }

    fn classify_cell(&self, k: u32, cells: &[u32]) -> CellClass {
        let width = T::from_ratio(1, k as i64);
        let mut all_full = true;
        for (set, &j) in self.coords.iter().zip(cells) {
            let lo = T::from_ratio(j as i64, k as i64);
            let overlap = set.overlap_with(lo, lo + width);
            if T::negligible(overlap) {
                return CellClass::Outside;
            }
            if T::negligible(width - overlap) {
                continue;
            }
            all_full = false;
        }
        if all_full {
            CellClass::Inside
        } else {
            CellClass::Boundary
        }
    }
}

impl<T: Scalar> Projectable for SimpleBox<T> {
    /// Strict projection: the image coordinates when every off-image
    /// coordinate has positive measure, the empty box otherwise.
    fn project(&self, emb: &Embedding) -> Result<Self> {
        check_projection(self.family, self.level, emb)?;
        let mut on_image = vec![false; self.coords.len()];
        for &c in &emb.map {
            on_image[c as usize] = true;
        }
        let off_image_null = self
            .coords
            .iter()
            .zip(&on_image)
            .any(|(set, &hit)| !hit && set.measure() <= T::zero());
        if off_image_null {
            return SimpleBox::empty(self.family, emb.source);
        }
        SimpleBox::new(
            self.family,
            emb.source,
            emb.map.iter().map(|&c| self.coords[c as usize].clone()).collect(),
        )
    }

    fn lift(&self, emb: &Embedding) -> Result<Self> {
        check_lift(self.family, self.level, emb)?;
        let mut lifted = SimpleBox::full(self.family, emb.target)?;
        for (i, &c) in emb.map.iter().enumerate() {
            lifted.coords[c as usize] = self.coords[i].clone();
        }
        Ok(lifted)
    }
}

/// `{"n":…, "family":…, "coords":[[["0.25","0.5"]],…]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxJson {
    pub n: u32,
    pub family: Family,
    pub coords: Vec<Vec<[String; 2]>>,
}
