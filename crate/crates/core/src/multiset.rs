//! Dense indexing of size-`n` multisets drawn from `p` points.
//!
//! A multiset is represented by its sorted tuple of point indices. Tuples are
//! ordered lexicographically, and [`MultisetIndex::rank`] maps each sorted tuple
//! to its position in that order, so a table of `C(p + n - 1, n)` values can be
//! stored in a flat vector.

use crate::space::Point;

/// Number of size-`n` multisets over `p` points, or `None` on overflow.
pub fn multiset_count(p: usize, n: usize) -> Option<usize> {
    if p == 0 {
        return Some(usize::from(n == 0));
    }
    binomial(p + n - 1, n)
}

fn binomial(a: usize, b: usize) -> Option<usize> {
    if b > a {
        return Some(0);
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Ranks and unranks sorted tuples in lexicographic order.
#[derive(Clone, Debug)]
pub struct MultisetIndex {
    points: usize,
    arity: usize,
    total: usize,
    // binom[a * (arity + 1) + b] = C(a, b) for a < points + arity, b <= arity
    binom: Vec<usize>,
}

impl MultisetIndex {
    pub fn new(points: usize, arity: usize) -> Option<Self> {
        let total = multiset_count(points, arity)?;
        let rows = points + arity;
        let cols = arity + 1;
        let mut binom = vec![0usize; rows * cols];
        for a in 0..rows {
            binom[a * cols] = 1;
            for b in 1..cols.min(a + 1) {
                let left = binom[(a - 1) * cols + b - 1];
                let up = if b < a { binom[(a - 1) * cols + b] } else { 0 };
                binom[a * cols + b] = left.checked_add(up)?;
            }
        }
        Some(Self {
            points,
            arity,
            total,
            binom,
        })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of distinct multisets.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    fn c(&self, a: usize, b: usize) -> usize {
        if b > a {
            0
        } else {
            self.binom[a * (self.arity + 1) + b]
        }
    }

    /// Lexicographic rank of a sorted tuple.
    ///
    /// The tuple `i_0 <= .. <= i_{n-1}` is shifted to the strict combination
    /// `c_j = i_j + j` of `N = p + n - 1`. Lexicographic order on `c` is the
    /// reverse of colexicographic order on the complement-reflected combination
    /// `N - 1 - c_{n-1-j}`, whose colex rank is a plain binomial sum.
    pub fn rank(&self, sorted: &[Point]) -> usize {
        debug_assert_eq!(sorted.len(), self.arity);
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        let big_n = self.points + self.arity - 1;
        let n = self.arity;
        let mut colex = 0usize;
        for j in 0..n {
            let k = n - 1 - j;
            let c = sorted[k].index() + k;
            let reflected = big_n - 1 - c;
            colex += self.c(reflected, j + 1);
        }
        self.total - 1 - colex
    }

    /// Inverse of [`rank`](Self::rank), writing the sorted tuple into `out`.
    pub fn unrank_into(&self, rank: usize, out: &mut [Point]) {
        debug_assert!(rank < self.total);
        debug_assert_eq!(out.len(), self.arity);
        let big_n = self.points + self.arity - 1;
        let n = self.arity;
        let mut remaining = self.total - 1 - rank;
        let mut upper = big_n;
        for j in (0..n).rev() {
            // largest reflected value v < upper with C(v, j + 1) <= remaining
            let mut v = upper - 1;
            while self.c(v, j + 1) > remaining {
                v -= 1;
            }
            remaining -= self.c(v, j + 1);
            upper = v;
            let k = n - 1 - j;
            let c = big_n - 1 - v;
            out[k] = Point(c - k);
        }
    }

    pub fn unrank(&self, rank: usize) -> Vec<Point> {
        let mut out = vec![Point(0); self.arity];
        self.unrank_into(rank, &mut out);
        out
    }

    /// All multisets in rank order.
    pub fn iter(&self) -> Multisets {
        Multisets {
            points: self.points,
            current: if self.total == 0 {
                None
            } else {
                Some(vec![Point(0); self.arity])
            },
        }
    }
}

/// Lexicographic enumeration of sorted tuples.
#[derive(Clone, Debug)]
pub struct Multisets {
    points: usize,
    current: Option<Vec<Point>>,
}

impl Iterator for Multisets {
    type Item = Vec<Point>;

    fn next(&mut self) -> Option<Vec<Point>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let last = self.points - 1;
        if let Some(pos) = next.iter().rposition(|p| p.index() < last) {
            let bumped = Point(next[pos].index() + 1);
            for slot in &mut next[pos..] {
                *slot = bumped;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}
