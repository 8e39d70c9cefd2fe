//! Small counting and unranking helpers shared by the embedding families.

pub fn binomial(n: u64, r: u64) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

pub fn factorial(n: u64) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

/// n (n-1) ... (n-r+1)
pub fn falling_factorial(n: u64, r: u64) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    (0..r).try_fold(1u128, |acc, i| acc.checked_mul((n - i) as u128))
}

/// The `rank`-th `r`-subset of `0..n` in lexicographic order, ascending.
pub fn unrank_combination(n: u32, r: u32, mut rank: u128) -> Vec<u32> {
    let mut out = Vec::with_capacity(r as usize);
    let mut next = 0u32;
    for slot in 0..r {
        let remaining = r - slot - 1;
        loop {
            let block = binomial((n - next - 1) as u64, remaining as u64).unwrap_or(u128::MAX);
            if rank < block {
                out.push(next);
                next += 1;
                break;
            }
            rank -= block;
            next += 1;
        }
    }
    out
}

/// The `rank`-th sequence of `r` distinct elements of `0..n` in
/// lexicographic order.
pub fn unrank_arrangement(n: u32, r: u32, mut rank: u128) -> Vec<u32> {
    let mut pool: Vec<u32> = (0..n).collect();
    let mut out = Vec::with_capacity(r as usize);
    for slot in 0..r {
        let block = falling_factorial((n - slot - 1) as u64, (r - slot - 1) as u64).unwrap_or(u128::MAX);
        let pick = (rank / block) as usize;
        rank %= block;
        out.push(pool.remove(pick));
    }
    out
}

/// Lexicographic index of the edge {i, j} (0-based vertices, i != j) in
/// E(K_n) ordered (0,1), (0,2), ..., (0,n-1), (1,2), ...
pub fn edge_index(n: u32, i: u32, j: u32) -> u32 {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Inverse of [`edge_index`].
pub fn edge_endpoints(n: u32, mut index: u32) -> (u32, u32) {
    let mut a = 0;
    loop {
        let row = n - a - 1;
        if index < row {
            return (a, a + 1 + index);
        }
        index -= row;
        a += 1;
    }
}

/// Calls `f` on every `r`-subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: u32, r: u32, mut f: impl FnMut(&[u32])) {
    if r > n {
        return;
    }
    let mut idx: Vec<u32> = (0..r).collect();
    loop {
        f(&idx);
        let mut pos = r as i64 - 1;
        while pos >= 0 && idx[pos as usize] == n - r + pos as u32 {
            pos -= 1;
        }
        if pos < 0 {
            return;
        }
        idx[pos as usize] += 1;
        for q in pos as usize + 1..r as usize {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Calls `f` on every permutation of `items` (Heap's algorithm).
pub fn for_each_permutation<T: Clone>(items: &[T], mut f: impl FnMut(&[T])) {
    let mut a = items.to_vec();
    let n = a.len();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
