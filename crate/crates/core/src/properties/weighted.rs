use super::{Property, PropertyDescriptor};
use crate::boxes::CellClass;
use crate::combinatorics::{edge_index, for_each_combination};
use crate::error::{Error, Result};
use crate::ssee::Family;

const TOL: f64 = 1e-9;

/// Edge weights on `K_n` such that every `s`-set of vertices spans total
/// weight at most `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weighted {
    s: u32,
    r: f64,
}

impl Weighted {
    pub fn new(s: u32, r: f64) -> Result<Self> {
        let pairs = (s * s.saturating_sub(1) / 2) as f64;
        if s < 2 || !(r > 0.0 && r <= pairs) {
            return Err(Error::Parameter(format!("weighted property needs s >= 2 and 0 < r <= C(s,2), got s={s}, r={r}")));
        }
        Ok(Self { s, r })
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `C(s,2)`.
    pub fn pairs(&self) -> u32 {
        self.s * (self.s - 1) / 2
    }

    /// Calls `f` with the edge indices of each `s`-subset until it returns
    /// false.
    fn for_each_subset(&self, n: u32, mut f: impl FnMut(&[usize]) -> bool) {
        let mut edges = Vec::with_capacity(self.pairs() as usize);
        let mut stop = false;
        for_each_combination(n, self.s, |set| {
            if stop {
                return;
            }
            edges.clear();
            for (a, &i) in set.iter().enumerate() {
                for &j in &set[a + 1..] {
                    edges.push(edge_index(n, i, j) as usize);
                }
            }
            stop = !f(&edges);
        });
    }
}

impl Property for Weighted {
    fn family(&self) -> Family {
        Family::CompleteGraphEdges
    }

    fn descriptor(&self) -> PropertyDescriptor {
        PropertyDescriptor::Weighted { s: self.s, r: self.r }
    }

    fn contains(&self, level: u32, point: &[f64]) -> bool {
        let mut ok = true;
        self.for_each_subset(level, |edges| {
            ok = edges.iter().map(|&e| point[e]).sum::<f64>() <= self.r + 1e-12;
            ok
        });
        ok
    }

    fn classify_cell(&self, level: u32, k: u32, cells: &[u32]) -> CellClass {
        let hi: Vec<u32> = cells.iter().map(|j| j + 1).collect();
        self.classify_range(level, k, cells, &hi, None).expect("range classifier")
    }

    fn hull_determined(&self) -> bool {
        true
    }

    fn classify_range(&self, level: u32, k: u32, lo: &[u32], hi: &[u32], assigned: Option<&[bool]>) -> Option<CellClass> {
        let limit = self.r * k as f64;
        let mut inside = true;
        let mut outside = false;
        self.for_each_subset(level, |edges| {
            if let Some(a) = assigned {
                if edges.iter().any(|&e| !a[e]) {
                    return true;
                }
            }
            let top: u64 = edges.iter().map(|&e| hi[e] as u64).sum();
            let bottom: u64 = edges.iter().map(|&e| lo[e] as u64).sum();
            if top as f64 > limit + TOL {
                inside = false;
            }
            if bottom as f64 >= limit - TOL {
                outside = true;
                return false;
            }
            true
        });
        Some(if outside {
            CellClass::Outside
        } else if inside {
            CellClass::Inside
        } else {
            CellClass::Boundary
        })
    }
}
