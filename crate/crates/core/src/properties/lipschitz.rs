use super::{Property, PropertyDescriptor};
use crate::boxes::CellClass;
use crate::error::{Error, Result};
use crate::ssee::Family;

const TOL: f64 = 1e-9;

/// c-Lipschitz functions on the hypercube: `|x_u - x_v| <= c` across every
/// edge of `Q_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lipschitz {
    c: f64,
}

impl Lipschitz {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::Parameter(format!("Lipschitz constant must lie in (0,1), got {c}")));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Calls `f(u, v)` for every edge of `Q_n`, `u < v`.
fn for_each_edge(level: u32, mut f: impl FnMut(usize, usize) -> bool) -> bool {
    for u in 0..1usize << level {
        for b in 0..level {
            if u >> b & 1 == 0 && !f(u, u | 1 << b) {
                return false;
            }
        }
    }
    true
}

impl Property for Lipschitz {
    fn family(&self) -> Family {
        Family::HypercubeVertices
    }

    fn descriptor(&self) -> PropertyDescriptor {
        PropertyDescriptor::Lipschitz { c: self.c }
    }

    fn contains(&self, level: u32, point: &[f64]) -> bool {
        point.len() == 1 << level && for_each_edge(level, |u, v| (point[u] - point[v]).abs() <= self.c)
    }

    fn classify_cell(&self, level: u32, k: u32, cells: &[u32]) -> CellClass {
        let hi: Vec<u32> = cells.iter().map(|j| j + 1).collect();
        self.classify_range(level, k, cells, &hi, None).expect("range classifier")
    }

    fn hull_determined(&self) -> bool {
        true
    }

    fn classify_range(&self, level: u32, k: u32, lo: &[u32], hi: &[u32], assigned: Option<&[bool]>) -> Option<CellClass> {
        let limit = self.c * k as f64;
        let mut inside = true;
        let mut outside = false;
        for_each_edge(level, |u, v| {
            if let Some(a) = assigned {
                if !a[u] || !a[v] {
                    return true;
                }
            }
            let sup = (hi[u] as i64 - lo[v] as i64).max(hi[v] as i64 - lo[u] as i64);
            if sup as f64 > limit + TOL {
                inside = false;
            }
            let inf = (lo[u] as i64 - hi[v] as i64).max(lo[v] as i64 - hi[u] as i64).max(0);
            // a gap of at least c everywhere leaves only the null set |gap| = c
            if inf as f64 >= limit - TOL {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::{classification_audit, hereditary_audit};

    #[test]
    fn membership_examples() {
        let p = Lipschitz::new(0.5).unwrap();
        assert!(p.contains(1, &[0.2, 0.6]));
        assert!(!p.contains(1, &[0.1, 0.7]));
        assert!(Lipschitz::new(1.0).is_err());
        assert!(Lipschitz::new(0.0).is_err());
    }

    #[test]
    fn extremal_box_is_inside() {
        let p = Lipschitz::new(0.5).unwrap();
        for n in 1..=3 {
            let dim = 1usize << n;
            assert_eq!(p.classify_range(n, 10, &vec![0; dim], &vec![5; dim], None), Some(CellClass::Inside));
            assert_eq!(p.classify_range(n, 10, &vec![0; dim], &vec![6; dim], None), Some(CellClass::Boundary));
        }
    }

    #[test]
    fn classification_agrees_with_membership() {
        let p = Lipschitz::new(0.3).unwrap();
        for n in 1..=2 {
            let (bad, classes) = classification_audit(&p, n, 7, 3000, 20, 5).unwrap();
            assert_eq!(bad, 0);
            assert!(classes[0] > 0 && classes[1] > 0);
        }
    }

    #[test]
    fn hereditary_at_small_levels() {
        let p = Lipschitz::new(0.5).unwrap();
        assert_eq!(hereditary_audit(&p, 1, 2, 10_000, 3, 4).unwrap().violations, 0);
        assert_eq!(hereditary_audit(&p, 2, 3, 2_000, 3, 4).unwrap().violations, 0);
    }
}
