use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{check_dims, edge_count, CompleteGraphColoring};
use crate::error::{Error, Result};

/// Default cap on the number of colorings an enumeration may visit.
pub const DEFAULT_ENUM_BUDGET: u128 = 50_000_000;

/// The (optionally symmetry-reduced) space of all `t`-colorings of `K_n`.
///
/// Colorings are ordered lexicographically as color sequences over the
/// lexicographic edge order. With symmetry breaking only canonical
/// sequences are kept: the first occurrences of colors appear in the order
/// `1, 2, 3, ...`, which picks one representative per orbit of the color
/// permutation group.
///
/// Every coloring has a rank in `0..len()`, so the space can be split into
/// index ranges and walked independently.
#[derive(Debug, Clone)]
pub struct ColoringSpace {
    n: usize,
    t: usize,
    m: usize,
    symmetry_breaking: bool,
    len: u128,
    // completions[pos * (t + 1) + mx]: ways to fill positions pos.. given the
    // largest color used so far is mx (canonical sequences only)
    completions: Vec<u128>,
}

impl ColoringSpace {
    pub fn new(n: usize, t: usize, symmetry_breaking: bool, budget: u128) -> Result<Self> {
        check_dims(n, t)?;
        let m = edge_count(n);
        let size = Self::size(n, t, symmetry_breaking);
        if size > BigUint::from(budget) {
            return Err(Error::BudgetExceeded {
                size: size.to_string(),
                budget,
            });
        }
        let len = size.to_u128().expect("size bounded by a u128 budget");
        let completions = if symmetry_breaking {
            let w = t + 1;
            let mut table = vec![0u128; (m + 1) * w];
            for mx in 0..=t {
                table[m * w + mx] = 1;
            }
            for pos in (0..m).rev() {
                for mx in 0..=t {
                    // entries that overflow correspond to unreachable states
                    let stay = (mx as u128).saturating_mul(table[(pos + 1) * w + mx]);
                    let open = if mx < t {
                        table[(pos + 1) * w + mx + 1]
                    } else {
                        0
                    };
                    table[pos * w + mx] = stay.saturating_add(open);
                }
            }
            table
        } else {
            Vec::new()
        };
        Ok(Self {
            n,
            t,
            m,
            symmetry_breaking,
            len,
            completions,
        })
    }

    /// Size of the space without any budget check.
    pub fn size(n: usize, t: usize, symmetry_breaking: bool) -> BigUint {
        let m = edge_count(n);
        if !symmetry_breaking {
            return BigUint::from(t).pow(m as u32);
        }
        // sum_{j <= t} S(m, j), Stirling numbers of the second kind
        let mut row = vec![BigUint::zero(); t + 1];
        row[0] = BigUint::one();
        for _ in 0..m {
            for j in (1..=t).rev() {
                row[j] = &row[j] * BigUint::from(j) + &row[j - 1];
            }
            row[0] = BigUint::zero();
        }
        row.iter().sum()
    }

    pub fn len(&self) -> u128 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn palette(&self) -> usize {
        self.t
    }

    pub fn symmetry_breaking(&self) -> bool {
        self.symmetry_breaking
    }

    fn completions(&self, pos: usize, mx: usize) -> u128 {
        self.completions[pos * (self.t + 1) + mx]
    }

    /// Color sequence with the given rank.
    pub fn unrank(&self, mut index: u128) -> Vec<u8> {
        assert!(index < self.len, "rank {} out of range {}", index, self.len);
        let mut seq = vec![0u8; self.m];
        if !self.symmetry_breaking {
            let t = self.t as u128;
            for slot in seq.iter_mut().rev() {
                *slot = (index % t) as u8 + 1;
                index /= t;
            }
            return seq;
        }
        let mut mx = 0usize;
        for (pos, slot) in seq.iter_mut().enumerate() {
            let top = (mx + 1).min(self.t);
            for c in 1..=top {
                let cnt = self.completions(pos + 1, mx.max(c));
                if index < cnt {
                    *slot = c as u8;
                    mx = mx.max(c);
                    break;
                }
                index -= cnt;
            }
        }
        seq
    }

    /// Rank of a color sequence, or `None` if it is not in the space.
    pub fn rank(&self, seq: &[u8]) -> Option<u128> {
        if seq.len() != self.m || seq.iter().any(|&c| c == 0 || c as usize > self.t) {
            return None;
        }
        if !self.symmetry_breaking {
            return Some(
                seq.iter()
                    .fold(0u128, |acc, &c| acc * self.t as u128 + (c as u128 - 1)),
            );
        }
        let mut mx = 0usize;
        let mut r = 0u128;
        for (pos, &c) in seq.iter().enumerate() {
            let c = c as usize;
            if c > mx + 1 {
                return None;
            }
            for smaller in 1..c {
                r += self.completions(pos + 1, mx.max(smaller));
            }
            mx = mx.max(c);
        }
        Some(r)
    }

    pub fn coloring(&self, index: u128) -> CompleteGraphColoring {
        CompleteGraphColoring {
            n: self.n,
            t: self.t,
            colors: self.unrank(index),
        }
    }

    pub fn iter(&self) -> SpaceIter<'_> {
        self.range(0, self.len)
    }

    /// Colorings with ranks in `start..end`, in rank order.
    pub fn range(&self, start: u128, end: u128) -> SpaceIter<'_> {
        let end = end.min(self.len);
        let current = (start < end).then(|| self.unrank(start));
        SpaceIter {
            space: self,
            next_rank: start,
            end,
            current,
        }
    }

    /// Advances `seq` to its successor in rank order. Returns false at the end.
    fn successor(&self, seq: &mut [u8]) -> bool {
        let t = self.t as u8;
        if !self.symmetry_breaking {
            for slot in seq.iter_mut().rev() {
                if *slot < t {
                    *slot += 1;
                    return true;
                }
                *slot = 1;
            }
            return false;
        }
        let mut prefix_max = vec![0u8; seq.len()];
        let mut mx = 0u8;
        for (i, &c) in seq.iter().enumerate() {
            prefix_max[i] = mx;
            mx = mx.max(c);
        }
        for i in (0..seq.len()).rev() {
            let cap = (prefix_max[i] + 1).min(t);
            if seq[i] < cap {
                seq[i] += 1;
                for slot in &mut seq[i + 1..] {
                    *slot = 1;
                }
                return true;
            }
        }
        false
    }
}

/// Iterator over a rank range of a [`ColoringSpace`].
pub struct SpaceIter<'a> {
    space: &'a ColoringSpace,
    next_rank: u128,
    end: u128,
    current: Option<Vec<u8>>,
}

impl SpaceIter<'_> {
    /// Rank of the coloring the next call to `next` returns.
    pub fn next_rank(&self) -> u128 {
        self.next_rank
    }
}

impl Iterator for SpaceIter<'_> {
    type Item = CompleteGraphColoring;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next_rank >= self.end {
            return None;
        }
        let seq = self.current.as_mut()?;
        let out = CompleteGraphColoring {
            n: self.space.n,
            t: self.space.t,
            colors: seq.clone(),
        };
        self.next_rank += 1;
        if self.next_rank < self.end {
            let advanced = self.space.successor(seq);
            debug_assert!(advanced);
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next_rank).min(usize::MAX as u128) as usize;
        (left, Some(left))
    }
}

/// Canonical first-occurrence relabeling of a color sequence.
pub fn canonicalize(seq: &[u8]) -> Vec<u8> {
    let mut map = [0u8; 256];
    let mut next = 1u8;
    seq.iter()
        .map(|&c| {
            if map[c as usize] == 0 {
                map[c as usize] = next;
                next += 1;
            }
            map[c as usize]
        })
        .collect()
}
