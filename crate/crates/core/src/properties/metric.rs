use super::{Property, PropertyDescriptor};
use crate::boxes::CellClass;
use crate::combinatorics::edge_index;
use crate::ssee::Family;

/// The metric polytope: edge lengths on `K_n` obeying every triangle
/// inequality.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Metric;

/// Calls `f` with the three edge indices of every triangle of `K_n`.
fn for_each_triangle(n: u32, mut f: impl FnMut([usize; 3]) -> bool) {
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let t = [edge_index(n, i, j), edge_index(n, i, l), edge_index(n, j, l)].map(|e| e as usize);
                if !f(t) {
                    return;
                }
            }
        }
    }
}

const ROTATIONS: [[usize; 3]; 3] = [[0, 1, 2], [1, 0, 2], [2, 0, 1]];

impl Property for Metric {
    fn family(&self) -> Family {
        Family::CompleteGraphEdges
    }

    fn descriptor(&self) -> PropertyDescriptor {
        PropertyDescriptor::Metric
    }

    fn contains(&self, level: u32, point: &[f64]) -> bool {
        let mut ok = true;
        for_each_triangle(level, |t| {
            ok = ROTATIONS
                .iter()
                .all(|&[a, b, c]| point[t[a]] <= point[t[b]] + point[t[c]]);
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

    fn classify_range(&self, level: u32, _k: u32, lo: &[u32], hi: &[u32], assigned: Option<&[bool]>) -> Option<CellClass> {
        let (lo, hi) = (|e: usize| lo[e] as i64, |e: usize| hi[e] as i64);
        let mut inside = true;
        let mut outside = false;
        for_each_triangle(level, |t| {
            if let Some(a) = assigned {
                if t.iter().any(|&e| !a[e]) {
                    return true;
                }
            }
            for [a, b, c] in ROTATIONS {
                let (ea, eb, ec) = (t[a], t[b], t[c]);
                if hi(ea) > lo(eb) + lo(ec) {
                    inside = false;
                }
                if lo(ea) >= hi(eb) + hi(ec) {
                    outside = true;
                    return false;
                }
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
        assert!(Metric.contains(3, &[0.5, 0.5, 0.5]));
        assert!(!Metric.contains(3, &[1.0, 0.4, 0.4]));
        assert!(Metric.contains(2, &[0.9]));
    }

    #[test]
    fn extremal_box_is_inside() {
        for n in 3..=5 {
            let dim = (n * (n - 1) / 2) as usize;
            assert_eq!(Metric.classify_range(n, 8, &vec![4; dim], &vec![8; dim], None), Some(CellClass::Inside));
            assert_eq!(Metric.classify_range(n, 8, &vec![3; dim], &vec![8; dim], None), Some(CellClass::Boundary));
        }
    }

    #[test]
    fn classification_agrees_with_membership() {
        for n in 3..=4 {
            let (bad, classes) = classification_audit(&Metric, n, 6, 3000, 20, 9).unwrap();
            assert_eq!(bad, 0);
            assert!(classes[0] > 0 && classes[1] > 0);
        }
    }

    #[test]
    fn hereditary_audits() {
        assert_eq!(hereditary_audit(&Metric, 3, 4, 10_000, 1, 4).unwrap().violations, 0);
        assert_eq!(hereditary_audit(&Metric, 3, 5, 2_000, 1, 4).unwrap().violations, 0);
    }
}
