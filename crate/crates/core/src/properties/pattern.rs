use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Property, PropertyDescriptor};
use crate::boxes::{Body, CellClass};
use crate::error::{Error, Result};
use crate::ssee::Family;

/// Tie-resolution orders a cell classification will enumerate.
const TIE_BUDGET: u64 = 40_320;

/// `sigma_x(i)` = rank of `x_i` among the coordinates (1-based).
pub fn permutation_from_point(x: &[f64]) -> Result<Vec<u32>> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    if order.windows(2).any(|w| x[w[0]] == x[w[1]]) {
        return Err(Error::Degenerate("tied coordinates have no rank permutation".into()));
    }
    let mut sigma = vec![0u32; x.len()];
    for (rank, &i) in order.iter().enumerate() {
        sigma[i] = rank as u32 + 1;
    }
    Ok(sigma)
}

fn check_permutation(p: &[u32]) -> Result<()> {
    let mut seen = vec![false; p.len()];
    for &v in p {
        if v == 0 || v as usize > p.len() || seen[v as usize - 1] {
            return Err(Error::Parameter(format!("{p:?} is not a permutation of 1..={}", p.len())));
        }
        seen[v as usize - 1] = true;
    }
    Ok(())
}

/// Whether `sigma` has a subsequence order-isomorphic to `pi`.
pub fn contains_pattern(sigma: &[u32], pi: &[u32]) -> bool {
    fn extend(sigma: &[u32], pi: &[u32], start: usize, chosen: &mut Vec<u32>) -> bool {
        let depth = chosen.len();
        if depth == pi.len() {
            return true;
        }
        if sigma.len() - start < pi.len() - depth {
            return false;
        }
        for pos in start..sigma.len() {
            let v = sigma[pos];
            // relative order with every earlier chosen entry must match pi
            let ok = chosen
                .iter()
                .zip(&pi[..depth])
                .all(|(&c, &p)| (c < v) == (p < pi[depth]));
            if ok {
                chosen.push(v);
                if extend(sigma, pi, pos + 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    pi.len() <= sigma.len() && extend(sigma, pi, 0, &mut Vec::with_capacity(pi.len()))
}

/// Rank permutations realised by points of a grid cell. Coordinates in a
/// common cell may appear in any relative order; `f` sees each candidate
/// permutation until it returns false. Returns false if the budget is hit.
fn for_each_cell_permutation(cells: &[u32], mut f: impl FnMut(&[u32]) -> bool) -> bool {
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&i| (cells[i], i));
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for q in 1..=order.len() {
        if q == order.len() || cells[order[q]] != cells[order[start]] {
            groups.push((start, q));
            start = q;
        }
    }
    let resolutions: u64 = groups
        .iter()
        .try_fold(1u64, |acc, &(a, b)| (1..=(b - a) as u64).try_fold(acc, |x, y| x.checked_mul(y)))
        .unwrap_or(u64::MAX);
    if resolutions > TIE_BUDGET {
        return false;
    }
    let mut sigma = vec![0u32; cells.len()];
    fn walk(
        groups: &[(usize, usize)],
        g: usize,
        order: &mut Vec<usize>,
        sigma: &mut Vec<u32>,
        f: &mut dyn FnMut(&[u32]) -> bool,
    ) -> bool {
        if g == groups.len() {
            for (rank, &i) in order.iter().enumerate() {
                sigma[i] = rank as u32 + 1;
            }
            return f(sigma);
        }
        let (a, b) = groups[g];
        if b - a == 1 {
            return walk(groups, g + 1, order, sigma, f);
        }
        let members: Vec<usize> = order[a..b].to_vec();
        let mut keep_going = true;
        crate::combinatorics::for_each_permutation(&members, |perm| {
            if keep_going {
                order[a..b].copy_from_slice(perm);
                keep_going = walk(groups, g + 1, order, sigma, f);
            }
        });
        keep_going
    }
    walk(&groups, 0, &mut order, &mut sigma, &mut f);
    true
}

/// Permutations avoiding the pattern `pi`, as a body over order injections:
/// points with distinct coordinates whose rank permutation avoids `pi`.
/// Points with tied coordinates (a null set) are non-members.
#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pi: Vec<u32>,
}

impl Pattern {
    pub fn new(pi: Vec<u32>) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::Parameter("pattern must be nonempty".into()));
        }
        check_permutation(&pi)?;
        Ok(Self { pi })
    }

    pub fn pi(&self) -> &[u32] {
        &self.pi
    }

    /// Whether the permutation avoids the pattern.
    pub fn avoids(&self, sigma: &[u32]) -> bool {
        !contains_pattern(sigma, &self.pi)
    }
}

impl Property for Pattern {
    fn family(&self) -> Family {
        Family::OrderInjections
    }

    fn descriptor(&self) -> PropertyDescriptor {
        PropertyDescriptor::Pattern { pi: self.pi.clone() }
    }

    fn contains(&self, _level: u32, point: &[f64]) -> bool {
        match permutation_from_point(point) {
            Ok(sigma) => self.avoids(&sigma),
            Err(_) => false,
        }
    }

    fn classify_cell(&self, _level: u32, _k: u32, cells: &[u32]) -> CellClass {
        let (mut any_in, mut any_out) = (false, false);
        let complete = for_each_cell_permutation(cells, |sigma| {
            if self.avoids(sigma) {
                any_in = true;
            } else {
                any_out = true;
            }
            !(any_in && any_out)
        });
        match (complete, any_in, any_out) {
            (true, true, false) => CellClass::Inside,
            (true, false, true) => CellClass::Outside,
            _ => CellClass::Boundary,
        }
    }
}

/// The body `b_sigma` of points whose coordinates are ordered like `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationBody {
    sigma: Vec<u32>,
}

impl PermutationBody {
    pub fn new(sigma: Vec<u32>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::Parameter("permutation must be nonempty".into()));
        }
        check_permutation(&sigma)?;
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> &[u32] {
        &self.sigma
    }

    /// Exact volume, integrating `1` over `x_{sigma^-1(1)} < ... <
    /// x_{sigma^-1(n)}` one variable at a time. Each partial integral is a
    /// polynomial in the next variable, kept as rational coefficients.
    pub fn volume_exact(&self) -> BigRational {
        // coefficients of p(t), lowest degree first
        let mut poly = vec![BigRational::one()];
        for _ in 0..self.sigma.len() {
            // q(t) = int_0^t p(s) ds
            let mut next = vec![BigRational::zero()];
            for (d, c) in poly.iter().enumerate() {
                next.push(c / BigRational::from_integer(BigInt::from(d + 1)));
            }
            poly = next;
        }
        poly.into_iter().fold(BigRational::zero(), |acc, c| acc + c)
    }
}

impl Body for PermutationBody {
    fn family(&self) -> Family {
        Family::OrderInjections
    }

    fn level(&self) -> u32 {
        self.sigma.len() as u32
    }

    fn contains(&self, point: &[f64]) -> bool {
        permutation_from_point(point).is_ok_and(|s| s == self.sigma)
    }

    fn classify_cell(&self, _k: u32, cells: &[u32]) -> CellClass {
        let n = self.sigma.len();
        let mut tied = false;
        for i in 0..n {
            for j in 0..n {
                if self.sigma[i] < self.sigma[j] {
                    if cells[i] > cells[j] {
                        return CellClass::Outside;
                    }
                    if cells[i] == cells[j] {
                        tied = true;
                    }
                }
            }
        }
        if tied {
            CellClass::Boundary
        } else {
            CellClass::Inside
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{factorial, for_each_permutation};
    use crate::properties::{classification_audit, hereditary_audit};
    use crate::rng::stream;
    use rand::Rng;

    /// Oracle: enumerate every index subset explicitly.
    fn naive_contains(sigma: &[u32], pi: &[u32]) -> bool {
        let n = sigma.len();
        let k = pi.len();
        (0u32..1 << n).filter(|m| m.count_ones() as usize == k).any(|m| {
            let sub: Vec<u32> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| sigma[i]).collect();
            (0..k).all(|a| (0..k).all(|b| (sub[a] < sub[b]) == (pi[a] < pi[b])))
        })
    }

    fn avoiders(n: u32, pi: &[u32]) -> u64 {
        let items: Vec<u32> = (1..=n).collect();
        let mut count = 0;
        for_each_permutation(&items, |s| {
            if !naive_contains(s, pi) {
                count += 1;
            }
        });
        count
    }

    #[test]
    fn ranks() {
        assert_eq!(permutation_from_point(&[0.2, 0.9, 0.5]).unwrap(), vec![1, 3, 2]);
        assert_eq!(permutation_from_point(&[0.1, 0.2, 0.3, 0.4]).unwrap(), vec![1, 2, 3, 4]);
        assert!(matches!(permutation_from_point(&[0.3, 0.3]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn containment_matches_naive_search() {
        let items: Vec<u32> = (1..=6).collect();
        let patterns = [vec![1, 3, 2], vec![2, 1], vec![1, 2, 3], vec![2, 4, 1, 3]];
        for_each_permutation(&items, |s| {
            for pi in &patterns {
                assert_eq!(contains_pattern(s, pi), naive_contains(s, pi));
            }
        });
        assert_eq!(avoiders(4, &[1, 3, 2]), 14);
        assert_eq!(avoiders(6, &[1, 3, 2]), 132);
        assert_eq!(avoiders(3, &[2, 3, 1]), 5);
    }

    #[test]
    fn trivial_pattern_empties_every_level() {
        let p = Pattern::new(vec![1]).unwrap();
        let mut rng = stream(1, 0);
        for n in 1..5 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            assert!(!p.contains(n, &x));
        }
    }

    #[test]
    fn equidistribution_of_rank_permutations() {
        let mut counts = std::collections::HashMap::new();
        let samples = 240_000u64;
        let key = crate::rng::StreamKey::new(17);
        for i in 0..samples {
            let mut rng = key.stream(i);
            let x: Vec<f64> = (0..4).map(|_| rng.gen()).collect();
            *counts.entry(permutation_from_point(&x).unwrap()).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 24);
        let p = 1.0 / 24.0;
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        for &c in counts.values() {
            assert!((c as f64 / samples as f64 - p).abs() <= 4.0 * sigma);
        }
    }

    #[test]
    fn permutation_bodies_have_volume_one_over_factorial() {
        for n in 1..=6u32 {
            let items: Vec<u32> = (1..=n).collect();
            let mut total = BigRational::zero();
            for_each_permutation(&items, |s| {
                let v = PermutationBody::new(s.to_vec()).unwrap().volume_exact();
                assert_eq!(v, BigRational::new(1.into(), (factorial(n as u64).unwrap() as u64).into()));
                total += v;
            });
            assert!(total.is_one());
        }
    }

    #[test]
    fn pattern_cells_agree_with_membership() {
        let p = Pattern::new(vec![1, 3, 2]).unwrap();
        for n in [3, 4, 5] {
            let (bad, classes) = classification_audit(&p, n, 6, 2000, 10, 4).unwrap();
            assert_eq!(bad, 0);
            assert!(classes[0] > 0 && classes[1] > 0);
        }
        let b = PermutationBody::new(vec![2, 1, 3]).unwrap();
        assert_eq!(b.classify_cell(4, &[2, 0, 3]), CellClass::Inside);
        assert_eq!(b.classify_cell(4, &[0, 2, 3]), CellClass::Outside);
        assert_eq!(b.classify_cell(4, &[2, 2, 3]), CellClass::Boundary);
    }

    #[test]
    fn pattern_avoidance_is_hereditary() {
        let p = Pattern::new(vec![1, 3, 2]).unwrap();
        assert_eq!(hereditary_audit(&p, 2, 3, 5_000, 2, 4).unwrap().violations, 0);
        assert_eq!(hereditary_audit(&p, 3, 5, 2_000, 2, 4).unwrap().violations, 0);
    }
}
