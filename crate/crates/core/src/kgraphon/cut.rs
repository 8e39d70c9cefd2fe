use rand::Rng;
use serde::Serialize;

use super::{KColouredGraph, StepGraphon};
use crate::combinatorics::for_each_permutation;
use crate::error::{Error, Result};
use crate::rng::stream;

/// Most parts (or vertices) the exact cut norm enumerates.
pub const EXACT_CUT_MAX_PARTS: usize = 13;
/// Most colours the exact cut norm enumerates sign patterns for.
pub const EXACT_CUT_MAX_COLOURS: u32 = 12;
/// Most equal parts `delta_cut` permutes.
pub const DELTA_CUT_MAX_PARTS: usize = 8;
const LOCAL_SEARCH_ROUNDS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutMode {
    Exact,
    /// Alternating best responses from random starts; the value found is a
    /// lower bound.
    LocalSearch { restarts: u32, seed: u64 },
}

impl CutMode {
    pub fn local_search(seed: u64) -> Self {
        CutMode::LocalSearch { restarts: 32, seed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutValue {
    pub value: f64,
    /// False when `value` is only a lower bound.
    pub exact: bool,
    /// Parts (or vertices) of the maximising `S` and `T`, 0-based.
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

/// `sum_c |sum_{a in S, b in T} d_c(a, b)|` maximised over `S, T`, where
/// `d` is `k` row-major `m x m` matrices, each symmetric.
struct CutProblem {
    m: usize,
    k: usize,
    d: Vec<Vec<f64>>,
}

impl CutProblem {
    fn objective(&self, s: &[bool], t: &[bool]) -> f64 {
        let m = self.m;
        self.d
            .iter()
            .map(|dc| {
                let mut total = 0.0;
                for a in (0..m).filter(|&a| s[a]) {
                    for b in (0..m).filter(|&b| t[b]) {
                        total += dc[a * m + b];
                    }
                }
                total.abs()
            })
            .sum()
    }

    /// Best `T` against fixed column sums `col[c][b] = sum_{a in S} d_c(a,b)`.
    /// For a colour subset `A`, `sum_{c in A} col` minus the rest is the
    /// signed score of `b`; the optimum takes every `b` with positive score.
    fn best_response(&self, col: &[Vec<f64>], t: &mut [bool]) -> f64 {
        let mut best = 0.0;
        let mut best_signs = 0u64;
        let mut score = vec![0.0; self.m];
        for signs in 0..1u64 << self.k {
            score.iter_mut().for_each(|x| *x = 0.0);
            for (c, colc) in col.iter().enumerate() {
                let sign = if signs >> c & 1 == 1 { 1.0 } else { -1.0 };
                for (x, v) in score.iter_mut().zip(colc) {
                    *x += sign * v;
                }
            }
            let value: f64 = score.iter().filter(|&&x| x > 0.0).sum();
            if value > best {
                best = value;
                best_signs = signs;
            }
        }
        score.iter_mut().for_each(|x| *x = 0.0);
        for (c, colc) in col.iter().enumerate() {
            let sign = if best_signs >> c & 1 == 1 { 1.0 } else { -1.0 };
            for (x, v) in score.iter_mut().zip(colc) {
                *x += sign * v;
            }
        }
        for (tb, x) in t.iter_mut().zip(&score) {
            *tb = *x > 0.0;
        }
        best
    }

    fn columns(&self, s: &[bool]) -> Vec<Vec<f64>> {
        let m = self.m;
        self.d
            .iter()
            .map(|dc| {
                let mut col = vec![0.0; m];
                for a in (0..m).filter(|&a| s[a]) {
                    for (b, x) in col.iter_mut().enumerate() {
                        *x += dc[a * m + b];
                    }
                }
                col
            })
            .collect()
    }

    fn exact(&self) -> Result<CutValue> {
        if self.m > EXACT_CUT_MAX_PARTS || self.k as u32 > EXACT_CUT_MAX_COLOURS {
            return Err(Error::Mode(format!(
                "exact cut norm handles at most {EXACT_CUT_MAX_PARTS} parts and {EXACT_CUT_MAX_COLOURS} colours, got {} and {}",
                self.m, self.k
            )));
        }
        let m = self.m;
        let mut col = vec![vec![0.0; m]; self.k];
        let mut s = vec![false; m];
        let mut t = vec![false; m];
        let mut best = (0.0, vec![false; m], vec![false; m]);
        // Gray-code walk over S updates the column sums one row at a time
        for step in 1..1u64 << m {
            let flip = step.trailing_zeros() as usize;
            s[flip] = !s[flip];
            let sign = if s[flip] { 1.0 } else { -1.0 };
            for (colc, dc) in col.iter_mut().zip(&self.d) {
                for (b, x) in colc.iter_mut().enumerate() {
                    *x += sign * dc[flip * m + b];
                }
            }
            let value = self.best_response(&col, &mut t);
            if value > best.0 {
                best = (value, s.clone(), t.clone());
            }
        }
        // recompute the winner from scratch to drop Gray-code drift
        let value = self.objective(&best.1, &best.2);
        Ok(CutValue {
            value,
            exact: true,
            s: indices(&best.1),
            t: indices(&best.2),
        })
    }

    fn local_search(&self, restarts: u32, seed: u64) -> CutValue {
        let m = self.m;
        let mut best = (0.0, vec![false; m], vec![false; m]);
        for r in 0..restarts.max(1) {
            let mut rng = stream(seed, r as u64);
            let mut s: Vec<bool> = (0..m).map(|_| rng.gen()).collect();
            let mut t = vec![false; m];
            let mut current = -1.0;
            for _ in 0..LOCAL_SEARCH_ROUNDS {
                self.best_response(&self.columns(&s), &mut t);
                // d is symmetric, so the best S against T is found the same way
                let value = self.best_response(&self.columns(&t), &mut s);
                if value <= current + 1e-15 {
                    break;
                }
                current = value;
            }
            self.best_response(&self.columns(&s), &mut t);
            let value = self.objective(&s, &t);
            if value > best.0 {
                best = (value, s, t);
            }
        }
        CutValue {
            value: best.0,
            exact: false,
            s: indices(&best.1),
            t: indices(&best.2),
        }
    }

    fn solve(&self, mode: CutMode) -> Result<CutValue> {
        match mode {
            CutMode::Exact => self.exact(),
            CutMode::LocalSearch { restarts, seed } => Ok(self.local_search(restarts, seed)),
        }
    }
}

fn indices(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

/// `d_cut(G, H) = max_{S,T} sum_c |e_c^G(S,T) - e_c^H(S,T)| / n^2`, with
/// ordered pairs `(u,v)`, `u != v`.
pub fn cut_distance_graphs(g: &KColouredGraph, h: &KColouredGraph, mode: CutMode) -> Result<CutValue> {
    if g.n != h.n || g.k != h.k {
        return Err(Error::Parameter("graphs must share vertex count and palette".into()));
    }
    let m = g.n as usize;
    let scale = 1.0 / (m * m) as f64;
    let mut d = vec![vec![0.0; m * m]; g.k as usize];
    for u in 0..g.n {
        for v in u + 1..g.n {
            let (a, b) = (g.colour(u, v) as usize - 1, h.colour(u, v) as usize - 1);
            if a == b {
                continue;
            }
            for (c, sign) in [(a, scale), (b, -scale)] {
                d[c][u as usize * m + v as usize] += sign;
                d[c][v as usize * m + u as usize] += sign;
            }
        }
    }
    CutProblem { m, k: g.k as usize, d }.solve(mode)
}

/// `d_cut(U, W) = sup_{S,T} sum_c |int_{S x T} (U_c - W_c)|` over the common
/// refinement of the two partitions. The objective is convex in each set's
/// membership on a part, so whole parts suffice.
pub fn cut_distance(u: &StepGraphon, w: &StepGraphon, mode: CutMode) -> Result<CutValue> {
    if u.k() != w.k() {
        return Err(Error::Parameter("graphons must share the palette".into()));
    }
    let mut bounds: Vec<f64> = u.boundaries().iter().chain(w.boundaries()).copied().collect();
    bounds.sort_by(f64::total_cmp);
    bounds.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    let m = bounds.len() - 1;
    if mode == CutMode::Exact && m > EXACT_CUT_MAX_PARTS {
        return Err(Error::Mode(format!(
            "common refinement has {m} parts; exact cut distance handles at most {EXACT_CUT_MAX_PARTS}"
        )));
    }
    let (ur, wr) = (u.refine(&bounds)?, w.refine(&bounds)?);
    let widths = ur.widths();
    let k = u.k() as usize;
    let mut d = vec![vec![0.0; m * m]; k];
    for a in 0..m {
        for b in 0..m {
            let area = widths[a] * widths[b];
            for (c, dc) in d.iter_mut().enumerate() {
                dc[a * m + b] = area * (ur.tile(a, b).probs()[c] - wr.tile(a, b).probs()[c]);
            }
        }
    }
    CutProblem { m, k, d }.solve(mode)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaCut {
    /// `min_pi d_cut(U, W^pi)` over permutations of equal parts: an upper
    /// bound on the distance under all measure-preserving maps.
    pub value: f64,
    pub permutation: Vec<usize>,
}

/// Minimum of the exact cut distance over relabellings of equal parts.
pub fn delta_cut(u: &StepGraphon, w: &StepGraphon) -> Result<DeltaCut> {
    let m = u.parts();
    if !u.has_equal_parts() || !w.has_equal_parts() || w.parts() != m {
        return Err(Error::UnsupportedLayout(
            "delta_cut needs two graphons with the same number of equal parts".into(),
        ));
    }
    if m > DELTA_CUT_MAX_PARTS {
        return Err(Error::UnsupportedLayout(format!("delta_cut permutes at most {DELTA_CUT_MAX_PARTS} parts, got {m}")));
    }
    let mut best: Option<DeltaCut> = None;
    let mut failure = None;
    let parts: Vec<usize> = (0..m).collect();
    for_each_permutation(&parts, |perm| {
        if failure.is_some() {
            return;
        }
        let value = match w.permute_parts(perm).and_then(|wp| cut_distance(u, &wp, CutMode::Exact)) {
            Ok(v) => v.value,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        if best.as_ref().map_or(true, |b| value < b.value) {
            best = Some(DeltaCut {
                value,
                permutation: perm.to_vec(),
            });
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(best.expect("at least one permutation")),
    }
}
