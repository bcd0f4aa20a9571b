//! Exact maximum packing of internally disjoint S-trees.
//!
//! Two candidates conflict iff they share an edge or a vertex outside `S`.
//! The packing is a maximum independent set of the conflict graph, found by
//! branch and bound over candidates in their given order, trying "take"
//! before "skip". Only strictly larger families replace the incumbent, so
//! the result is the maximum family whose sorted index list is
//! lexicographically smallest.

use super::STree;

const EXTERNAL_TAG: u64 = 1 << 63;

/// Sorted conflict keys: one per edge, one per vertex outside `S`.
fn keys(tree: &STree) -> Vec<u64> {
    let mut ks: Vec<u64> = tree
        .edges()
        .iter()
        .map(|&(u, v)| ((u as u64) << 32) | v as u64)
        .chain(tree.external_vertices().map(|v| EXTERNAL_TAG | v as u64))
        .collect();
    ks.sort_unstable();
    ks
}

fn intersects(a: &[u64], b: &[u64]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

struct Search<'a> {
    conflict: &'a [Vec<u64>],
    best: Vec<usize>,
    stop_at: usize,
}

impl Search<'_> {
    fn run(&mut self, current: &mut Vec<usize>, mut avail: Vec<u64>) {
        loop {
            if self.best.len() >= self.stop_at {
                return;
            }
            let remaining: usize = avail.iter().map(|w| w.count_ones() as usize).sum();
            if current.len() + remaining <= self.best.len() {
                return;
            }
            let Some(word) = avail.iter().position(|&w| w != 0) else {
                return;
            };
            let i = word * 64 + avail[word].trailing_zeros() as usize;
            avail[word] &= avail[word] - 1;

            let next: Vec<u64> = avail
                .iter()
                .zip(&self.conflict[i])
                .map(|(a, c)| a & !c)
                .collect();
            current.push(i);
            if current.len() > self.best.len() {
                self.best = current.clone();
            }
            self.run(current, next);
            current.pop();
        }
    }
}

/// Indices of a maximum set of pairwise internally disjoint candidates.
/// Stops early once `stop_at` candidates are packed.
pub fn max_packing(cands: &[STree], stop_at: usize) -> Vec<usize> {
    let c = cands.len();
    if c == 0 || stop_at == 0 {
        return Vec::new();
    }
    let words = c.div_ceil(64);
    let ks: Vec<Vec<u64>> = cands.iter().map(keys).collect();
    let mut conflict = vec![vec![0u64; words]; c];
    for i in 0..c {
        for j in i + 1..c {
            if intersects(&ks[i], &ks[j]) {
                conflict[i][j / 64] |= 1 << (j % 64);
                conflict[j][i / 64] |= 1 << (i % 64);
            }
        }
    }
    let mut avail = vec![u64::MAX; words];
    if !c.is_multiple_of(64) {
        avail[words - 1] = (1u64 << (c % 64)) - 1;
    }
    let mut search = Search {
        conflict: &conflict,
        best: Vec::new(),
        stop_at,
    };
    search.run(&mut Vec::new(), avail);
    search.best
}
